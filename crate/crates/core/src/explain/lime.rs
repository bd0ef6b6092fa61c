//! LIME: local surrogate linear explanations over a binary
//! interpretable space, plus frequency-based global aggregation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::explain::{model_id, ImportanceVector, Method};
use crate::model::{stream_seed, EnsembleModel};

#[derive(Debug, Clone)]
pub struct LimeConfig {
    pub n_samples: usize,
    /// Defaults to 0.75 * sqrt(n_features) when unset.
    pub kernel_width: Option<f64>,
    /// Number of coefficients kept per explanation.
    pub k: usize,
    pub ridge_lambda: f64,
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            n_samples: 1000,
            kernel_width: None,
            k: 3,
            ridge_lambda: 1e-3,
            seed: 0,
        }
    }
}

/// Sparse local explanation of one instance.
#[derive(Debug, Clone)]
pub struct LimeExplanation {
    pub instance_id: usize,
    /// Top-k (feature, coefficient) pairs by absolute value, descending.
    pub feature_weights: Vec<(String, f64)>,
    pub intercept: f64,
    pub kernel_width: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Per-feature discretization of the background: quartile bins for
/// numeric columns, category identity for ordinals.
struct Binner {
    /// Sorted quartile boundaries per numeric column; empty for ordinals.
    boundaries: Vec<Vec<f64>>,
}

impl Binner {
    fn fit(background: &Dataset) -> Result<Self> {
        if background.row_count() < 8 {
            return Err(Error::DegenerateDataset(format!(
                "background has {} rows; at least 8 are needed to form quartile bins",
                background.row_count()
            )));
        }
        let boundaries = background
            .columns
            .iter()
            .enumerate()
            .map(|(j, col)| match col.kind {
                ColumnKind::Ordinal => Vec::new(),
                ColumnKind::Numeric => {
                    let mut values = background.column_values(j);
                    values.sort_by(f64::total_cmp);
                    [0.25, 0.5, 0.75]
                        .iter()
                        .map(|q| values[((values.len() - 1) as f64 * q).round() as usize])
                        .collect()
                }
            })
            .collect();
        Ok(Binner { boundaries })
    }

    fn bin(&self, feature: usize, value: f64) -> usize {
        let bounds = &self.boundaries[feature];
        if bounds.is_empty() {
            // ordinal: the encoded index is the bin
            return if value < 0.0 { usize::MAX } else { value as usize };
        }
        bounds.iter().filter(|&&b| value > b).count()
    }
}

/// Solve (X'WX + lambda*I)beta = X'Wy by Gaussian elimination with
/// partial pivoting. The first column of X is the unpenalized intercept.
fn weighted_ridge(x: &[Vec<f64>], y: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    let p = x[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, (&yi, &wi)) in x.iter().zip(y.iter().zip(w)) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += wi * row[i] * row[j];
            }
            a[i][p] += wi * row[i] * yi;
        }
    }
    for (i, row) in a.iter_mut().enumerate().skip(1) {
        row[i] += lambda;
    }

    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let diag = a[col][col];
        if diag.abs() < 1e-12 {
            continue;
        }
        for row in col + 1..p {
            let factor = a[row][col] / diag;
            for j in col..=p {
                a[row][j] -= factor * a[col][j];
            }
        }
    }
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let mut sum = a[i][p];
        for j in i + 1..p {
            sum -= a[i][j] * beta[j];
        }
        beta[i] = if a[i][i].abs() < 1e-12 {
            0.0
        } else {
            sum / a[i][i]
        };
    }
    beta
}

/// Explain one instance. Perturbations draw each feature independently
/// from the background empirical distribution; the interpretable bit
/// for a feature is whether the perturbed value falls in the same
/// bin/category as the instance's value. Samples are weighted by
/// exp(-D^2 / kernel_width^2) with D the Hamming distance in
/// interpretable space, and a ridge surrogate is fit to the model's
/// class-1 probability.
pub fn lime_local(
    m: &EnsembleModel,
    background: &Dataset,
    instance: &[f64],
    instance_id: usize,
    cfg: &LimeConfig,
) -> Result<LimeExplanation> {
    let d = m.feature_names.len();
    if instance.len() != d {
        return Err(Error::ArityMismatch {
            expected: d,
            got: instance.len(),
        });
    }
    if background.feature_names() != m.feature_names {
        return Err(Error::UniverseMismatch(
            "background columns do not match the model's features".into(),
        ));
    }
    if cfg.n_samples < 10 * cfg.k {
        return Err(Error::InvalidParameter(format!(
            "n_samples {} is below 10*k = {}",
            cfg.n_samples,
            10 * cfg.k
        )));
    }
    let binner = Binner::fit(background)?;
    let kernel_width = cfg
        .kernel_width
        .unwrap_or_else(|| 0.75 * (d as f64).sqrt());
    let instance_bins: Vec<usize> = (0..d).map(|j| binner.bin(j, instance[j])).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_bg = background.row_count();

    let mut design = Vec::with_capacity(cfg.n_samples);
    let mut responses = Vec::with_capacity(cfg.n_samples);
    let mut weights = Vec::with_capacity(cfg.n_samples);
    for _ in 0..cfg.n_samples {
        let mut perturbed = vec![0.0; d];
        let mut z = vec![0.0; d + 1];
        z[0] = 1.0;
        let mut hamming = 0usize;
        for j in 0..d {
            perturbed[j] = background.rows[rng.gen_range(0..n_bg)][j];
            if binner.bin(j, perturbed[j]) == instance_bins[j] {
                z[j + 1] = 1.0;
            } else {
                hamming += 1;
            }
        }
        let weight = (-((hamming * hamming) as f64) / (kernel_width * kernel_width)).exp();
        responses.push(m.predict_proba(&perturbed)?);
        design.push(z);
        weights.push(weight);
    }

    let beta = weighted_ridge(&design, &responses, &weights, cfg.ridge_lambda);
    let mut ranked: Vec<(String, f64)> = m
        .feature_names
        .iter()
        .zip(beta.iter().skip(1))
        .map(|(n, &b)| (n.clone(), b))
        .collect();
    ranked.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    ranked.truncate(cfg.k);

    Ok(LimeExplanation {
        instance_id,
        feature_weights: ranked,
        intercept: beta[0],
        kernel_width,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
    })
}

/// Global aggregation: the score of a feature is the fraction of
/// instances whose top-k local explanation contains it.
pub fn lime_global(m: &EnsembleModel, d: &Dataset, cfg: &LimeConfig) -> Result<ImportanceVector> {
    if d.row_count() == 0 {
        return Err(Error::DegenerateDataset("no instances to explain".into()));
    }
    let mut iv = ImportanceVector::new(Method::Lime, m, false);
    iv.model_id = model_id(m);
    for (i, row) in d.rows.iter().enumerate() {
        let per_instance = LimeConfig {
            seed: stream_seed(cfg.seed, i as u64),
            ..cfg.clone()
        };
        let explanation = lime_local(m, d, row, i, &per_instance)?;
        for (name, _) in &explanation.feature_weights {
            *iv.scores.get_mut(name).unwrap() += 1.0;
        }
    }
    let n = d.row_count() as f64;
    for v in iv.scores.values_mut() {
        *v /= n;
    }
    Ok(iv)
}
