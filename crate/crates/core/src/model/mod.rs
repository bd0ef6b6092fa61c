//! Tree-based classifiers: CART decision tree, bagged random forest and
//! second-order gradient-boosted trees.

mod boosting;
mod dtree;
mod forest;
mod serialize;

pub use boosting::{train_gradient_boosting, training_loss_trace};
pub use dtree::train_decision_tree;
pub use forest::train_random_forest;
pub use serialize::{load_model, save_model, FORMAT_VERSION};

use serde::{Deserialize, Serialize};

use crate::data::MISSING;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Dt,
    Rf,
    Gbt,
}

/// Per-split feature subset size for random forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(&self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            MaxFeatures::Count(k) => (*k).clamp(1, n_features),
        }
    }
}

/// Training hyperparameters, echoed verbatim into serialized models.
/// Fields irrelevant to a model kind are carried but ignored: dt ignores
/// `n_estimators`, `learning_rate`, `l2_lambda` and `min_gain`; rf
/// additionally ignores the boosting parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model_kind: ModelKind,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub n_estimators: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub min_gain: f64,
    pub seed: u64,
}

impl ModelParams {
    pub fn dt(max_depth: usize, min_samples_leaf: usize, seed: u64) -> Self {
        ModelParams {
            model_kind: ModelKind::Dt,
            max_depth,
            min_samples_leaf,
            n_estimators: 1,
            max_features: MaxFeatures::All,
            bootstrap: false,
            learning_rate: 0.0,
            l2_lambda: 0.0,
            min_gain: 0.0,
            seed,
        }
    }

    pub fn rf(max_depth: usize, min_samples_leaf: usize, n_estimators: usize, seed: u64) -> Self {
        ModelParams {
            model_kind: ModelKind::Rf,
            max_depth,
            min_samples_leaf,
            n_estimators,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            learning_rate: 0.0,
            l2_lambda: 0.0,
            min_gain: 0.0,
            seed,
        }
    }

    /// Boosting defaults: learning rate 0.3, L2 lambda 1, min gain 0.
    pub fn gbt(max_depth: usize, n_estimators: usize, seed: u64) -> Self {
        ModelParams {
            model_kind: ModelKind::Gbt,
            max_depth,
            min_samples_leaf: 1,
            n_estimators,
            max_features: MaxFeatures::All,
            bootstrap: false,
            learning_rate: 0.3,
            l2_lambda: 1.0,
            min_gain: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidParameter(
                "min_samples_leaf must be >= 1".into(),
            ));
        }
        if self.n_estimators < 1 {
            return Err(Error::InvalidParameter("n_estimators must be >= 1".into()));
        }
        if self.model_kind == ModelKind::Gbt {
            if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
                return Err(Error::InvalidParameter(
                    "learning_rate must be in (0,1]".into(),
                ));
            }
            if self.l2_lambda < 0.0 || self.min_gain < 0.0 {
                return Err(Error::InvalidParameter(
                    "l2_lambda and min_gain must be >= 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A split tree. Leaf values are class-1 probabilities for dt/rf trees
/// and additive logit increments for gbt trees.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
        n_samples: usize,
        impurity: f64,
        gain: f64,
    },
    Leaf {
        value: f64,
        n_samples: usize,
        class_counts: Option<(usize, usize)>,
    },
}

/// Routing rule shared by every consumer of a split: the missing
/// sentinel goes left, otherwise strictly-less-than goes left.
pub fn goes_left(value: f64, threshold: f64) -> bool {
    value == MISSING || value < threshold
}

impl TreeNode {
    pub fn n_samples(&self) -> usize {
        match self {
            TreeNode::Internal { n_samples, .. } | TreeNode::Leaf { n_samples, .. } => *n_samples,
        }
    }

    /// Raw output of this tree for one encoded row.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { value, .. } => *value,
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                if goes_left(row[*feature], *threshold) {
                    left.predict_row(row)
                } else {
                    right.predict_row(row)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Visit every internal node.
    pub fn visit_internal(&self, f: &mut dyn FnMut(usize, f64, usize, f64, f64)) {
        if let TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
            n_samples,
            impurity,
            gain,
        } = self
        {
            f(*feature, *threshold, *n_samples, *impurity, *gain);
            left.visit_internal(f);
            right.visit_internal(f);
        }
    }

    /// Cover-weighted expectation of the tree output, using per-node
    /// sample counts as the conditional distribution.
    pub fn expectation(&self) -> f64 {
        match self {
            TreeNode::Leaf { value, .. } => *value,
            TreeNode::Internal {
                left,
                right,
                n_samples,
                ..
            } => {
                let n = *n_samples as f64;
                (left.n_samples() as f64 / n) * left.expectation()
                    + (right.n_samples() as f64 / n) * right.expectation()
            }
        }
    }
}

/// How ensemble member outputs are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Single,
    Vote,
    AdditiveLogit,
}

/// A trained, immutable model: one or more trees plus the aggregation
/// rule that turns their outputs into a class-1 probability.
#[derive(Debug, Clone)]
pub struct EnsembleModel {
    pub kind: Aggregation,
    pub trees: Vec<TreeNode>,
    /// Prior logit for additive-logit models, 0 otherwise.
    pub base_score: f64,
    pub learning_rate: f64,
    pub params: ModelParams,
    pub feature_names: Vec<String>,
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl EnsembleModel {
    fn check_arity(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.feature_names.len() {
            return Err(Error::ArityMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        Ok(())
    }

    /// Raw margin: leaf probability (single), mean per-tree leaf
    /// probability (vote) or prior-plus-scaled-tree-sum logit
    /// (additive_logit).
    pub fn raw_output(&self, row: &[f64]) -> Result<f64> {
        self.check_arity(row)?;
        Ok(match self.kind {
            Aggregation::Single => self.trees[0].predict_row(row),
            Aggregation::Vote => {
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                sum / self.trees.len() as f64
            }
            Aggregation::AdditiveLogit => {
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                self.base_score + self.learning_rate * sum
            }
        })
    }

    /// Class-1 probability for one encoded row.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        self.check_arity(row)?;
        Ok(match self.kind {
            Aggregation::Single => self.trees[0].predict_row(row),
            Aggregation::Vote => {
                let votes = self
                    .trees
                    .iter()
                    .filter(|t| t.predict_row(row) >= 0.5)
                    .count();
                votes as f64 / self.trees.len() as f64
            }
            Aggregation::AdditiveLogit => sigmoid(self.raw_output(row)?),
        })
    }

    /// Predicted class. Single and additive-logit models threshold the
    /// probability at 0.5 inclusive; vote models take the strict
    /// majority, with ties going to class 0.
    pub fn predict(&self, row: &[f64]) -> Result<u8> {
        match self.kind {
            Aggregation::Vote => {
                let votes = self
                    .trees
                    .iter()
                    .filter(|t| t.predict_row(row) >= 0.5)
                    .count();
                self.check_arity(row)?;
                Ok(u8::from(2 * votes > self.trees.len()))
            }
            _ => Ok(u8::from(self.predict_proba(row)? >= 0.5)),
        }
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

/// Derive a deterministic per-member rng seed from the model seed and
/// the member index (splitmix64 finalizer).
pub(crate) fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump(feature: usize, threshold: f64, left: f64, right: f64) -> TreeNode {
        TreeNode::Internal {
            feature,
            threshold,
            left: Box::new(TreeNode::Leaf {
                value: left,
                n_samples: 5,
                class_counts: None,
            }),
            right: Box::new(TreeNode::Leaf {
                value: right,
                n_samples: 5,
                class_counts: None,
            }),
            n_samples: 10,
            impurity: 0.5,
            gain: 0.5,
        }
    }

    #[test]
    fn missing_sentinel_routes_left() {
        let t = stump(0, 0.5, 0.0, 1.0);
        assert_eq!(t.predict_row(&[MISSING]), 0.0);
        assert_eq!(t.predict_row(&[0.0]), 0.0);
        assert_eq!(t.predict_row(&[1.0]), 1.0);
    }

    #[test]
    fn vote_fraction_and_tie_rule() {
        let m = EnsembleModel {
            kind: Aggregation::Vote,
            trees: vec![stump(0, 0.5, 0.0, 1.0), stump(0, 0.5, 0.0, 1.0), stump(0, 0.5, 1.0, 0.0)],
            base_score: 0.0,
            learning_rate: 0.0,
            params: ModelParams::rf(1, 1, 3, 0),
            feature_names: vec!["x".into()],
        };
        assert_eq!(m.predict_proba(&[1.0]).unwrap(), 2.0 / 3.0);
        assert_eq!(m.predict(&[1.0]).unwrap(), 1);

        let tie = EnsembleModel {
            kind: Aggregation::Vote,
            trees: vec![stump(0, 0.5, 0.0, 1.0), stump(0, 0.5, 1.0, 0.0)],
            base_score: 0.0,
            learning_rate: 0.0,
            params: ModelParams::rf(1, 1, 2, 0),
            feature_names: vec!["x".into()],
        };
        assert_eq!(tie.predict_proba(&[1.0]).unwrap(), 0.5);
        assert_eq!(tie.predict(&[1.0]).unwrap(), 0);
    }

    #[test]
    fn additive_logit_zero_margin_is_half() {
        let m = EnsembleModel {
            kind: Aggregation::AdditiveLogit,
            trees: vec![TreeNode::Leaf {
                value: 0.0,
                n_samples: 10,
                class_counts: None,
            }],
            base_score: 0.0,
            learning_rate: 0.3,
            params: ModelParams::gbt(1, 1, 0),
            feature_names: vec!["x".into()],
        };
        assert_eq!(m.predict_proba(&[0.3]).unwrap(), 0.5);
        assert_eq!(m.predict(&[0.3]).unwrap(), 1); // threshold inclusive
    }

    #[test]
    fn arity_mismatch() {
        let m = EnsembleModel {
            kind: Aggregation::Single,
            trees: vec![stump(0, 0.5, 0.0, 1.0)],
            base_score: 0.0,
            learning_rate: 0.0,
            params: ModelParams::dt(1, 1, 0),
            feature_names: vec!["x".into()],
        };
        assert!(m.predict_proba(&[0.0, 1.0]).is_err());
    }
}
