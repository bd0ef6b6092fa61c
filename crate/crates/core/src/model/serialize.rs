//! Model JSON round-tripping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Aggregation, EnsembleModel, ModelParams, TreeNode};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    format_version: String,
    kind: Aggregation,
    params: ModelParams,
    base_score: f64,
    learning_rate: f64,
    feature_names: Vec<String>,
    trees: Vec<NodeDoc>,
}

/// One recursive node object. Internal nodes carry `feature`,
/// `threshold`, `left`, `right`, `impurity` and `gain`; leaves carry
/// `value` and optionally `class_counts`.
#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    feature: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left: Option<Box<NodeDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right: Option<Box<NodeDoc>>,
    n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    impurity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_counts: Option<(usize, usize)>,
}

fn node_to_doc(node: &TreeNode, feature_names: &[String]) -> NodeDoc {
    match node {
        TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
            n_samples,
            impurity,
            gain,
        } => NodeDoc {
            feature: Some(feature_names[*feature].clone()),
            threshold: Some(*threshold),
            left: Some(Box::new(node_to_doc(left, feature_names))),
            right: Some(Box::new(node_to_doc(right, feature_names))),
            n_samples: *n_samples,
            impurity: Some(*impurity),
            gain: Some(*gain),
            value: None,
            class_counts: None,
        },
        TreeNode::Leaf {
            value,
            n_samples,
            class_counts,
        } => NodeDoc {
            feature: None,
            threshold: None,
            left: None,
            right: None,
            n_samples: *n_samples,
            impurity: None,
            gain: None,
            value: Some(*value),
            class_counts: *class_counts,
        },
    }
}

fn doc_to_node(doc: &NodeDoc, feature_names: &[String]) -> Result<TreeNode> {
    match (&doc.feature, &doc.value) {
        (Some(feature), _) => {
            let index = feature_names
                .iter()
                .position(|n| n == feature)
                .ok_or_else(|| {
                    Error::MalformedModel(format!("split feature {feature:?} not in feature_names"))
                })?;
            let threshold = doc
                .threshold
                .ok_or_else(|| Error::MalformedModel("internal node missing threshold".into()))?;
            let (Some(left), Some(right)) = (&doc.left, &doc.right) else {
                return Err(Error::MalformedModel("internal node missing a child".into()));
            };
            Ok(TreeNode::Internal {
                feature: index,
                threshold,
                left: Box::new(doc_to_node(left, feature_names)?),
                right: Box::new(doc_to_node(right, feature_names)?),
                n_samples: doc.n_samples,
                impurity: doc.impurity.unwrap_or(0.0),
                gain: doc.gain.unwrap_or(0.0),
            })
        }
        (None, Some(value)) => Ok(TreeNode::Leaf {
            value: *value,
            n_samples: doc.n_samples,
            class_counts: doc.class_counts,
        }),
        (None, None) => Err(Error::MalformedModel(
            "node has neither a split feature nor a leaf value".into(),
        )),
    }
}

/// Serialize a model to its versioned JSON document. Output is
/// byte-stable for a given model.
pub fn save_model(m: &EnsembleModel) -> Result<String> {
    let doc = ModelDoc {
        format_version: FORMAT_VERSION.to_string(),
        kind: m.kind,
        params: m.params.clone(),
        base_score: m.base_score,
        learning_rate: m.learning_rate,
        feature_names: m.feature_names.clone(),
        trees: m
            .trees
            .iter()
            .map(|t| node_to_doc(t, &m.feature_names))
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Parse a model JSON document, checking the format version first.
pub fn load_model(text: &str) -> Result<EnsembleModel> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value
        .get("format_version")
        .and_then(|v| v.as_str())
        .unwrap_or("")
        .to_string();
    if found != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found,
            expected: FORMAT_VERSION.to_string(),
        });
    }
    let doc: ModelDoc = serde_json::from_value(value)?;
    let trees = doc
        .trees
        .iter()
        .map(|t| doc_to_node(t, &doc.feature_names))
        .collect::<Result<Vec<_>>>()?;
    if trees.is_empty() {
        return Err(Error::MalformedModel("model has no trees".into()));
    }
    Ok(EnsembleModel {
        kind: doc.kind,
        trees,
        base_score: doc.base_score,
        learning_rate: doc.learning_rate,
        params: doc.params,
        feature_names: doc.feature_names,
    })
}
