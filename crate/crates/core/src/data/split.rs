//! Seeded holdout splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Train/test partition of a source dataset.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub seed: u64,
    pub test_fraction: f64,
}

/// Deterministic seeded holdout split. With `stratify`, per-class test
/// counts are rounded independently so class proportions in both
/// partitions match the source within one row.
pub fn split(d: &Dataset, test_fraction: f64, seed: u64, stratify: bool) -> Result<SplitPair> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test_fraction must be in (0,1), got {test_fraction}"
        )));
    }
    let n = d.row_count();
    if n < 4 {
        return Err(Error::DegenerateDataset(format!(
            "need at least 4 rows to split, got {n}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_indices: Vec<usize> = Vec::new();
    let mut train_indices: Vec<usize> = Vec::new();

    if stratify {
        for class in [0u8, 1u8] {
            let mut idx: Vec<usize> = (0..n).filter(|&i| d.target[i] == class).collect();
            idx.shuffle(&mut rng);
            let k = (test_fraction * idx.len() as f64).round() as usize;
            let k = k.min(idx.len());
            test_indices.extend(&idx[..k]);
            train_indices.extend(&idx[k..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let k = (test_fraction * n as f64).round() as usize;
        test_indices.extend(&idx[..k]);
        train_indices.extend(&idx[k..]);
    }

    if test_indices.is_empty() || train_indices.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "fraction {test_fraction} leaves an empty partition for {n} rows"
        )));
    }

    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok(SplitPair {
        train: d.subset(&train_indices),
        test: d.subset(&test_indices),
        seed,
        test_fraction,
    })
}
