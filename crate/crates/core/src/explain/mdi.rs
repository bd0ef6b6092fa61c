//! Mean decrease in impurity.

use crate::explain::{ImportanceVector, Method};
use crate::model::{EnsembleModel, ModelKind};

/// Split-improvement importance. For Gini trees each internal node
/// contributes (node_samples / root_samples) * gain to its split
/// feature; boosted trees contribute their raw structure gain. Scores
/// are averaged over ensemble members and normalized to sum to 1 when
/// any split exists.
pub fn mdi(m: &EnsembleModel) -> ImportanceVector {
    let mut iv = ImportanceVector::new(Method::Mdi, m, false);
    let n_features = m.feature_names.len();
    let mut totals = vec![0.0f64; n_features];

    for tree in &m.trees {
        let root_samples = tree.n_samples() as f64;
        tree.visit_internal(&mut |feature, _thr, n_samples, _imp, gain| {
            let contribution = match m.params.model_kind {
                ModelKind::Gbt => gain,
                _ => (n_samples as f64 / root_samples) * gain,
            };
            totals[feature] += contribution;
        });
    }
    for t in totals.iter_mut() {
        *t /= m.trees.len() as f64;
    }

    let sum: f64 = totals.iter().sum();
    if sum > 0.0 {
        for t in totals.iter_mut() {
            *t /= sum;
        }
        iv.normalized = true;
    }
    for (name, &t) in m.feature_names.iter().zip(&totals) {
        iv.scores.insert(name.clone(), t);
    }
    iv
}
