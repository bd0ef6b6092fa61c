//! Bagged random forest with majority voting.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::dtree::{build_gini_tree, check_trainable};
use crate::model::{stream_seed, Aggregation, EnsembleModel, ModelKind, ModelParams};

/// Train `n_estimators` Gini trees, each on a bootstrap sample (when
/// enabled) with a per-split random feature subset. Each member's random
/// stream is derived from (seed, member index), so the result does not
/// depend on training order.
pub fn train_random_forest(train: &Dataset, p: &ModelParams) -> Result<EnsembleModel> {
    check_trainable(train, p)?;
    if p.model_kind != ModelKind::Rf {
        return Err(Error::InvalidParameter(format!(
            "expected rf params, got {:?}",
            p.model_kind
        )));
    }
    let n = train.row_count();
    let n_features = train.columns.len();
    let k = p.max_features.resolve(n_features);

    let trees = (0..p.n_estimators)
        .map(|member| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(p.seed, member as u64));
            let indices: Vec<usize> = if p.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut sample = move || {
                let mut features: Vec<usize> = (0..n_features).collect();
                let (subset, _) = features.partial_shuffle(&mut rng, k);
                let mut subset = subset.to_vec();
                subset.sort_unstable();
                subset
            };
            build_gini_tree(
                &train.rows,
                &train.target,
                &indices,
                0,
                p.max_depth,
                p.min_samples_leaf,
                &mut sample,
            )
        })
        .collect();

    Ok(EnsembleModel {
        kind: Aggregation::Vote,
        trees,
        base_score: 0.0,
        learning_rate: 0.0,
        params: p.clone(),
        feature_names: train.feature_names(),
    })
}
