//! CART training with Gini impurity.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{Aggregation, EnsembleModel, ModelKind, ModelParams, TreeNode};

fn gini(c0: usize, c1: usize) -> f64 {
    let n = (c0 + c1) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = c0 as f64 / n;
    let p1 = c1 as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Exhaustive split search over midpoint thresholds between consecutive
/// distinct sorted values. Ties keep the first candidate in
/// (feature, threshold) order.
fn find_best_split(
    rows: &[Vec<f64>],
    target: &[u8],
    indices: &[usize],
    candidates: &[usize],
    min_samples_leaf: usize,
    parent_impurity: f64,
) -> Option<BestSplit> {
    let n = indices.len();
    let mut best: Option<BestSplit> = None;

    for &feature in candidates {
        let mut pairs: Vec<(f64, u8)> = indices
            .iter()
            .map(|&i| (rows[i][feature], target[i]))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let total1 = pairs.iter().filter(|p| p.1 == 1).count();
        let mut left_n = 0usize;
        let mut left1 = 0usize;
        for w in 0..n - 1 {
            left_n += 1;
            left1 += pairs[w].1 as usize;
            if pairs[w].0 == pairs[w + 1].0 {
                continue;
            }
            let right_n = n - left_n;
            if left_n < min_samples_leaf || right_n < min_samples_leaf {
                continue;
            }
            let threshold = (pairs[w].0 + pairs[w + 1].0) / 2.0;
            let right1 = total1 - left1;
            let weighted = (left_n as f64 * gini(left_n - left1, left1)
                + right_n as f64 * gini(right_n - right1, right1))
                / n as f64;
            let gain = parent_impurity - weighted;
            if best.as_ref().map_or(true, |b| gain > b.gain) {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for &i in indices {
                    if crate::model::goes_left(rows[i][feature], threshold) {
                        left.push(i);
                    } else {
                        right.push(i);
                    }
                }
                best = Some(BestSplit {
                    feature,
                    threshold,
                    gain,
                    left,
                    right,
                });
            }
        }
    }
    best
}

/// Grow a Gini tree over the rows at `indices`. `sample_features` picks
/// the candidate feature subset for each split (identity for a plain
/// decision tree, a seeded random subset for forests). Impure nodes are
/// split even at zero gain so that parity patterns such as XOR, where no
/// single split reduces impurity, are still separable within the depth
/// budget.
pub(crate) fn build_gini_tree(
    rows: &[Vec<f64>],
    target: &[u8],
    indices: &[usize],
    depth: usize,
    max_depth: usize,
    min_samples_leaf: usize,
    sample_features: &mut dyn FnMut() -> Vec<usize>,
) -> TreeNode {
    let n = indices.len();
    let c1 = indices.iter().filter(|&&i| target[i] == 1).count();
    let c0 = n - c1;
    let impurity = gini(c0, c1);

    let leaf = |c0: usize, c1: usize| TreeNode::Leaf {
        value: if n == 0 { 0.0 } else { c1 as f64 / n as f64 },
        n_samples: n,
        class_counts: Some((c0, c1)),
    };

    if depth >= max_depth || impurity == 0.0 || n < 2 * min_samples_leaf {
        return leaf(c0, c1);
    }
    let candidates = sample_features();
    let Some(split) = find_best_split(rows, target, indices, &candidates, min_samples_leaf, impurity)
    else {
        return leaf(c0, c1);
    };

    let left = build_gini_tree(
        rows,
        target,
        &split.left,
        depth + 1,
        max_depth,
        min_samples_leaf,
        sample_features,
    );
    let right = build_gini_tree(
        rows,
        target,
        &split.right,
        depth + 1,
        max_depth,
        min_samples_leaf,
        sample_features,
    );
    TreeNode::Internal {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
        n_samples: n,
        impurity,
        gain: split.gain,
    }
}

pub(crate) fn check_trainable(train: &Dataset, p: &ModelParams) -> Result<()> {
    p.validate()?;
    if train.row_count() == 0 {
        return Err(Error::DegenerateDataset("no rows".into()));
    }
    if p.min_samples_leaf > train.row_count() {
        return Err(Error::InvalidParameter(format!(
            "min_samples_leaf {} exceeds row count {}",
            p.min_samples_leaf,
            train.row_count()
        )));
    }
    Ok(())
}

/// Train a single CART classifier.
pub fn train_decision_tree(train: &Dataset, p: &ModelParams) -> Result<EnsembleModel> {
    check_trainable(train, p)?;
    if p.model_kind != ModelKind::Dt {
        return Err(Error::InvalidParameter(format!(
            "expected dt params, got {:?}",
            p.model_kind
        )));
    }
    let n_features = train.columns.len();
    let all: Vec<usize> = (0..n_features).collect();
    let indices: Vec<usize> = (0..train.row_count()).collect();
    let root = build_gini_tree(
        &train.rows,
        &train.target,
        &indices,
        0,
        p.max_depth,
        p.min_samples_leaf,
        &mut || all.clone(),
    );
    Ok(EnsembleModel {
        kind: Aggregation::Single,
        trees: vec![root],
        base_score: 0.0,
        learning_rate: 0.0,
        params: p.clone(),
        feature_names: train.feature_names(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthesize, xor_dataset, ColumnSpec, Dataset, DecisionRule, GeneratorSpec};

    #[test]
    fn xor_is_separated_at_depth_two() {
        let d = xor_dataset();
        let m = train_decision_tree(&d, &ModelParams::dt(2, 1, 0)).unwrap();
        assert_eq!(m.trees[0].depth(), 2);
        let preds = m.predict_all(&d.rows).unwrap();
        assert_eq!(preds, d.target);
    }

    #[test]
    fn perfect_feature_gives_depth_one_tree() {
        let d = synthesize(&GeneratorSpec {
            n_rows: 40,
            columns: vec![ColumnSpec::numeric("noise"), ColumnSpec::numeric("x")],
            rule: DecisionRule::ThresholdGe("x".into(), 0.5),
            noise_rate: 0.0,
            seed: 2,
        })
        .unwrap();
        let m = train_decision_tree(&d, &ModelParams::dt(3, 1, 0)).unwrap();
        assert_eq!(m.trees[0].depth(), 1);
        if let TreeNode::Internal { feature, .. } = &m.trees[0] {
            assert_eq!(*feature, 1);
        } else {
            panic!("expected a split");
        }
    }

    #[test]
    fn gini_gain_recomputable_from_counts() {
        let d = synthesize(&GeneratorSpec {
            n_rows: 300,
            columns: vec![ColumnSpec::numeric("a"), ColumnSpec::numeric("b")],
            rule: DecisionRule::LinearGe(vec![("a".into(), 1.0), ("b".into(), 0.7)], 0.8),
            noise_rate: 0.1,
            seed: 3,
        })
        .unwrap();
        let m = train_decision_tree(&d, &ModelParams::dt(4, 5, 0)).unwrap();
        fn check(node: &TreeNode) {
            if let TreeNode::Internal {
                left,
                right,
                n_samples,
                impurity,
                gain,
                ..
            } = node
            {
                fn node_gini(n: &TreeNode) -> f64 {
                    match n {
                        TreeNode::Leaf {
                            class_counts: Some((c0, c1)),
                            ..
                        } => gini(*c0, *c1),
                        TreeNode::Internal { impurity, .. } => *impurity,
                        _ => panic!("dt leaf without class counts"),
                    }
                }
                let n = *n_samples as f64;
                let weighted = (left.n_samples() as f64 * node_gini(left)
                    + right.n_samples() as f64 * node_gini(right))
                    / n;
                assert!((gain - (impurity - weighted)).abs() < 1e-12);
                assert_eq!(left.n_samples() + right.n_samples(), *n_samples);
                check(left);
                check(right);
            }
        }
        check(&m.trees[0]);
    }

    #[test]
    fn depth_and_leaf_constraints_hold() {
        let d = synthesize(&GeneratorSpec {
            n_rows: 200,
            columns: vec![ColumnSpec::numeric("a"), ColumnSpec::numeric("b")],
            rule: DecisionRule::ThresholdGe("a".into(), 0.3),
            noise_rate: 0.2,
            seed: 4,
        })
        .unwrap();
        let p = ModelParams::dt(3, 10, 0);
        let m = train_decision_tree(&d, &p).unwrap();
        assert!(m.trees[0].depth() <= 3);
        fn min_leaf(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { n_samples, .. } => *n_samples,
                TreeNode::Internal { left, right, .. } => min_leaf(left).min(min_leaf(right)),
            }
        }
        assert!(min_leaf(&m.trees[0]) >= 10);
    }

    #[test]
    fn empty_dataset_and_oversized_msl_error() {
        let empty = Dataset::new(vec![ColumnSpec::numeric("x")], vec![], vec![]).unwrap();
        assert!(train_decision_tree(&empty, &ModelParams::dt(2, 1, 0)).is_err());

        let d = xor_dataset();
        assert!(train_decision_tree(&d, &ModelParams::dt(2, 10, 0)).is_err());
    }
}
