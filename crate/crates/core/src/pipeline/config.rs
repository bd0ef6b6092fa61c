//! TOML pipeline configuration: flat keys plus one section per model
//! spec, feature set and reference ranking.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::concordance::{DiscretizePolicy, WeightMap};
use crate::error::{Error, Result};
use crate::explain::{LimeConfig, Method};
use crate::metrics::Averaging;
use crate::model::{MaxFeatures, ModelKind, ModelParams};

/// One model of the experimental grid. Optional fields fall back to the
/// kind's defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub max_depth: usize,
    pub min_samples_leaf: Option<usize>,
    pub n_estimators: Option<usize>,
    pub learning_rate: Option<f64>,
    pub l2_lambda: Option<f64>,
    pub min_gain: Option<f64>,
    pub max_features: Option<usize>,
    pub bootstrap: Option<bool>,
}

impl ModelSpec {
    pub fn to_params(&self, seed: u64) -> Result<ModelParams> {
        let mut p = match self.kind {
            ModelKind::Dt => ModelParams::dt(self.max_depth, self.min_samples_leaf.unwrap_or(1), seed),
            ModelKind::Rf => ModelParams::rf(
                self.max_depth,
                self.min_samples_leaf.unwrap_or(1),
                self.n_estimators.unwrap_or(100),
                seed,
            ),
            ModelKind::Gbt => {
                ModelParams::gbt(self.max_depth, self.n_estimators.unwrap_or(100), seed)
            }
        };
        if let Some(lr) = self.learning_rate {
            p.learning_rate = lr;
        }
        if let Some(l2) = self.l2_lambda {
            p.l2_lambda = l2;
        }
        if let Some(g) = self.min_gain {
            p.min_gain = g;
        }
        if let Some(k) = self.max_features {
            p.max_features = MaxFeatures::Count(k);
        }
        if let Some(b) = self.bootstrap {
            p.bootstrap = b;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSetRef {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceRef {
    pub path: PathBuf,
    /// Optional JSON file mapping abbreviated feature names to
    /// universe names.
    pub aliases: Option<PathBuf>,
}

/// LIME settings carried in the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LimeSettings {
    pub n_samples: usize,
    pub k: usize,
    pub kernel_width: Option<f64>,
    pub ridge_lambda: f64,
}

impl Default for LimeSettings {
    fn default() -> Self {
        let d = LimeConfig::default();
        LimeSettings {
            n_samples: d.n_samples,
            k: d.k,
            kernel_width: d.kernel_width,
            ridge_lambda: d.ridge_lambda,
        }
    }
}

impl LimeSettings {
    pub fn to_config(&self, seed: u64) -> LimeConfig {
        LimeConfig {
            n_samples: self.n_samples,
            kernel_width: self.kernel_width,
            k: self.k,
            ridge_lambda: self.ridge_lambda,
            seed,
        }
    }
}

fn default_test_fraction() -> f64 {
    0.3
}
fn default_stratify() -> bool {
    true
}
fn default_methods() -> Vec<Method> {
    vec![Method::Mdi, Method::Mda, Method::Shap, Method::Lime]
}
fn default_mda_repeats() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub target: String,
    pub out_dir: PathBuf,
    /// Mandatory: every stochastic stage derives its streams from this.
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_stratify")]
    pub stratify: bool,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_mda_repeats")]
    pub mda_repeats: usize,
    #[serde(default)]
    pub lime: LimeSettings,
    #[serde(default)]
    pub discretize: DiscretizePolicy,
    #[serde(default)]
    pub weight_map: WeightMap,
    #[serde(default)]
    pub averaging: Averaging,
    #[serde(rename = "feature_set")]
    pub feature_sets: Vec<FeatureSetRef>,
    #[serde(rename = "model")]
    pub models: Vec<ModelSpec>,
    #[serde(rename = "reference", default)]
    pub references: Vec<ReferenceRef>,
}

impl PipelineConfig {
    /// Eager validation: every referenced path must exist and every
    /// model spec must produce valid parameters, before any training.
    pub fn validate(&self) -> Result<()> {
        let mut paths: Vec<&Path> = vec![&self.data, &self.schema];
        for fs in &self.feature_sets {
            paths.push(&fs.path);
        }
        for r in &self.references {
            paths.push(&r.path);
            if let Some(a) = &r.aliases {
                paths.push(a);
            }
        }
        for p in paths {
            if !p.exists() {
                return Err(Error::Config(format!(
                    "referenced path does not exist: {}",
                    p.display()
                )));
            }
        }
        if self.models.is_empty() {
            return Err(Error::Config("no [[model]] sections".into()));
        }
        if self.feature_sets.is_empty() {
            return Err(Error::Config("no [[feature_set]] sections".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods list is empty".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must be in (0,1), got {}",
                self.test_fraction
            )));
        }
        if self.mda_repeats == 0 {
            return Err(Error::Config("mda_repeats must be >= 1".into()));
        }
        self.weight_map
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        for m in &self.models {
            m.to_params(self.seed)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// Parse and validate a config file. Relative paths inside the file are
/// resolved against the file's directory.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = crate::pipeline::read_text(path)?;
    let mut cfg: PipelineConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(&p);
        }
    };
    resolve(&mut cfg.data);
    resolve(&mut cfg.schema);
    resolve(&mut cfg.out_dir);
    for fs in &mut cfg.feature_sets {
        resolve(&mut fs.path);
    }
    for r in &mut cfg.references {
        resolve(&mut r.path);
        if let Some(a) = &mut r.aliases {
            resolve(a);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
