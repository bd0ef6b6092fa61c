//! Path-dependent tree SHAP: exact Shapley attributions for tree
//! ensembles using per-node sample covers as the conditional
//! distribution.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::explain::{model_id, ImportanceVector, Method};
use crate::model::{goes_left, Aggregation, EnsembleModel, TreeNode};

/// Per-instance signed attributions plus the shared base value (the
/// cover-weighted expected raw output of the model).
#[derive(Debug, Clone, Serialize)]
pub struct ShapMatrix {
    pub model_id: String,
    pub features: Vec<String>,
    pub base_value: f64,
    /// One row per explained instance, one column per feature.
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
struct PathItem {
    feature: Option<usize>,
    zero_fraction: f64,
    one_fraction: f64,
    pweight: f64,
}

fn extend_path(path: &mut Vec<PathItem>, zero_fraction: f64, one_fraction: f64, feature: Option<usize>) {
    let depth = path.len();
    path.push(PathItem {
        feature,
        zero_fraction,
        one_fraction,
        pweight: if depth == 0 { 1.0 } else { 0.0 },
    });
    for i in (0..depth).rev() {
        path[i + 1].pweight +=
            one_fraction * path[i].pweight * (i + 1) as f64 / (depth + 1) as f64;
        path[i].pweight =
            zero_fraction * path[i].pweight * (depth - i) as f64 / (depth + 1) as f64;
    }
}

fn unwind_path(path: &mut Vec<PathItem>, index: usize) {
    let depth = path.len() - 1;
    let one_fraction = path[index].one_fraction;
    let zero_fraction = path[index].zero_fraction;
    let mut next_one_portion = path[depth].pweight;
    for i in (0..depth).rev() {
        if one_fraction != 0.0 {
            let tmp = path[i].pweight;
            path[i].pweight = next_one_portion * (depth + 1) as f64 / ((i + 1) as f64 * one_fraction);
            next_one_portion =
                tmp - path[i].pweight * zero_fraction * (depth - i) as f64 / (depth + 1) as f64;
        } else {
            path[i].pweight =
                path[i].pweight * (depth + 1) as f64 / (zero_fraction * (depth - i) as f64);
        }
    }
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
    path.pop();
}

fn unwound_path_sum(path: &[PathItem], index: usize) -> f64 {
    let depth = path.len() - 1;
    let one_fraction = path[index].one_fraction;
    let zero_fraction = path[index].zero_fraction;
    let mut next_one_portion = path[depth].pweight;
    let mut total = 0.0;
    if one_fraction != 0.0 {
        for i in (0..depth).rev() {
            let tmp = next_one_portion / ((i + 1) as f64 * one_fraction);
            total += tmp;
            next_one_portion = path[i].pweight - tmp * zero_fraction * (depth - i) as f64;
        }
    } else {
        for i in (0..depth).rev() {
            total += path[i].pweight / (zero_fraction * (depth - i) as f64);
        }
    }
    total * (depth + 1) as f64
}

fn shap_recursive(
    node: &TreeNode,
    row: &[f64],
    phi: &mut [f64],
    mut path: Vec<PathItem>,
    zero_fraction: f64,
    one_fraction: f64,
    feature: Option<usize>,
) {
    extend_path(&mut path, zero_fraction, one_fraction, feature);
    match node {
        TreeNode::Leaf { value, .. } => {
            for i in 1..path.len() {
                let w = unwound_path_sum(&path, i);
                phi[path[i].feature.unwrap()] +=
                    w * (path[i].one_fraction - path[i].zero_fraction) * value;
            }
        }
        TreeNode::Internal {
            feature: split_feature,
            threshold,
            left,
            right,
            n_samples,
            ..
        } => {
            let (hot, cold) = if goes_left(row[*split_feature], *threshold) {
                (left, right)
            } else {
                (right, left)
            };
            let n = *n_samples as f64;
            let hot_zero = hot.n_samples() as f64 / n;
            let cold_zero = cold.n_samples() as f64 / n;

            let mut incoming_zero = 1.0;
            let mut incoming_one = 1.0;
            if let Some(prev) = (1..path.len()).find(|&i| path[i].feature == Some(*split_feature)) {
                incoming_zero = path[prev].zero_fraction;
                incoming_one = path[prev].one_fraction;
                unwind_path(&mut path, prev);
            }

            shap_recursive(
                hot,
                row,
                phi,
                path.clone(),
                hot_zero * incoming_zero,
                incoming_one,
                Some(*split_feature),
            );
            shap_recursive(
                cold,
                row,
                phi,
                path,
                cold_zero * incoming_zero,
                0.0,
                Some(*split_feature),
            );
        }
    }
}

/// Attributions of one tree's raw output for one row.
pub fn tree_shap(tree: &TreeNode, row: &[f64], n_features: usize) -> Vec<f64> {
    let mut phi = vec![0.0; n_features];
    shap_recursive(tree, row, &mut phi, Vec::new(), 1.0, 1.0, None);
    phi
}

/// Explain every row of `d`. Single and additive-logit models are
/// explained on their raw margin; vote ensembles are explained on the
/// mean per-tree leaf probability, which differs from the discontinuous
/// vote itself but keeps attributions additive per tree.
pub fn shap_values(m: &EnsembleModel, d: &Dataset) -> Result<ShapMatrix> {
    if m.trees.is_empty() {
        return Err(Error::MalformedModel("model has no trees".into()));
    }
    let n_features = m.feature_names.len();
    let expectation_sum: f64 = m.trees.iter().map(|t| t.expectation()).sum();
    let (scale, base_value) = match m.kind {
        Aggregation::Single => (1.0, expectation_sum),
        Aggregation::Vote => {
            let k = m.trees.len() as f64;
            (1.0 / k, expectation_sum / k)
        }
        Aggregation::AdditiveLogit => (
            m.learning_rate,
            m.base_score + m.learning_rate * expectation_sum,
        ),
    };

    let mut rows = Vec::with_capacity(d.row_count());
    for row in &d.rows {
        if row.len() != n_features {
            return Err(Error::ArityMismatch {
                expected: n_features,
                got: row.len(),
            });
        }
        let mut phi = vec![0.0; n_features];
        for tree in &m.trees {
            let tree_phi = tree_shap(tree, row, n_features);
            for (acc, p) in phi.iter_mut().zip(tree_phi) {
                *acc += scale * p;
            }
        }
        rows.push(phi);
    }

    Ok(ShapMatrix {
        model_id: model_id(m),
        features: m.feature_names.clone(),
        base_value,
        rows,
    })
}

/// Global importance: mean absolute attribution per feature.
pub fn shap_global(sm: &ShapMatrix) -> ImportanceVector {
    let n = sm.rows.len().max(1) as f64;
    let scores = sm
        .features
        .iter()
        .enumerate()
        .map(|(j, name)| {
            (
                name.clone(),
                sm.rows.iter().map(|r| r[j].abs()).sum::<f64>() / n,
            )
        })
        .collect();
    ImportanceVector {
        method: Method::Shap,
        model_id: sm.model_id.clone(),
        normalized: false,
        scores,
    }
}

impl ShapMatrix {
    /// CSV form: one row per instance, one column per feature, final
    /// column the base value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.features.join(","));
        out.push_str(",base_value\n");
        for row in &self.rows {
            for v in row {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{}\n", self.base_value));
        }
        out
    }
}
