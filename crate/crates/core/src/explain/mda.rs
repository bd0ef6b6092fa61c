//! Permutation importance (mean decrease accuracy).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::explain::{ImportanceVector, Method};
use crate::model::{stream_seed, EnsembleModel};

fn accuracy(preds: &[u8], labels: &[u8]) -> f64 {
    preds.iter().zip(labels).filter(|(p, l)| p == l).count() as f64 / labels.len() as f64
}

/// Mean accuracy drop over `n_repeats` seeded column permutations, per
/// feature. Negative means are preserved; callers floor them before
/// rank discretization.
pub fn mda(
    m: &EnsembleModel,
    d: &Dataset,
    n_repeats: usize,
    seed: u64,
) -> Result<ImportanceVector> {
    if d.row_count() == 0 {
        return Err(Error::DegenerateDataset("no evaluation rows".into()));
    }
    if n_repeats == 0 {
        return Err(Error::InvalidParameter("n_repeats must be >= 1".into()));
    }
    for name in &m.feature_names {
        d.column_index(name)?;
    }

    let baseline = accuracy(&m.predict_all(&d.rows)?, &d.target);
    let mut iv = ImportanceVector::new(Method::Mda, m, false);

    for (f_idx, name) in m.feature_names.iter().enumerate() {
        let col = d.column_index(name)?;
        let mut drop_sum = 0.0;
        for repeat in 0..n_repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(
                seed,
                ((f_idx as u64) << 32) | repeat as u64,
            ));
            let mut values = d.column_values(col);
            values.shuffle(&mut rng);
            let mut rows = d.rows.clone();
            for (row, v) in rows.iter_mut().zip(values) {
                row[col] = v;
            }
            drop_sum += baseline - accuracy(&m.predict_all(&rows)?, &d.target);
        }
        iv.scores.insert(name.clone(), drop_sum / n_repeats as f64);
    }
    Ok(iv)
}
