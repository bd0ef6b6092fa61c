//! Feature-importance extraction: MDI, permutation importance (MDA),
//! path-dependent tree SHAP, and LIME with global aggregation.

mod lime;
mod mda;
mod mdi;
mod shap;

pub use lime::{lime_global, lime_local, LimeConfig, LimeExplanation};
pub use mda::mda;
pub use mdi::mdi;
pub use shap::{shap_global, shap_values, tree_shap, ShapMatrix};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::EnsembleModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mdi,
    Mda,
    Shap,
    Lime,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mdi => "mdi",
            Method::Mda => "mda",
            Method::Shap => "shap",
            Method::Lime => "lime",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mdi" => Ok(Method::Mdi),
            "mda" => Ok(Method::Mda),
            "shap" => Ok(Method::Shap),
            "lime" => Ok(Method::Lime),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown method {other:?}"
            ))),
        }
    }
}

/// Method-tagged per-feature importance scores, keyed exactly by the
/// model's feature names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub method: Method,
    pub model_id: String,
    pub normalized: bool,
    pub scores: BTreeMap<String, f64>,
}

impl ImportanceVector {
    pub fn new(method: Method, model: &EnsembleModel, normalized: bool) -> Self {
        ImportanceVector {
            method,
            model_id: model_id(model),
            normalized,
            scores: model
                .feature_names
                .iter()
                .map(|n| (n.clone(), 0.0))
                .collect(),
        }
    }

    /// Copy with negative scores clamped to 0, for rank discretization.
    pub fn floored(&self) -> Self {
        let mut out = self.clone();
        for v in out.scores.values_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        out
    }
}

/// Short human-readable model identifier used to tag importance vectors
/// and artifacts.
pub fn model_id(m: &EnsembleModel) -> String {
    let p = &m.params;
    match p.model_kind {
        crate::model::ModelKind::Dt => {
            format!("dt-md{}-msl{}-seed{}", p.max_depth, p.min_samples_leaf, p.seed)
        }
        crate::model::ModelKind::Rf => format!(
            "rf-md{}-msl{}-ne{}-seed{}",
            p.max_depth, p.min_samples_leaf, p.n_estimators, p.seed
        ),
        crate::model::ModelKind::Gbt => {
            format!("gbt-md{}-ne{}-seed{}", p.max_depth, p.n_estimators, p.seed)
        }
    }
}
