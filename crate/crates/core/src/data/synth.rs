//! Synthetic dataset generation for tests and examples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{ColumnKind, ColumnSpec, Dataset};
use crate::error::{Error, Result};

/// Labeling rule over encoded column values.
#[derive(Debug, Clone)]
pub enum DecisionRule {
    /// y = 1 iff the two (binary-encoded) columns differ.
    Xor(String, String),
    /// y = 1 iff the column's encoded value is >= the threshold.
    ThresholdGe(String, f64),
    /// y = 1 iff the weighted sum of columns is >= the bias.
    LinearGe(Vec<(String, f64)>, f64),
}

impl DecisionRule {
    fn columns(&self) -> Vec<&str> {
        match self {
            DecisionRule::Xor(a, b) => vec![a, b],
            DecisionRule::ThresholdGe(c, _) => vec![c],
            DecisionRule::LinearGe(ws, _) => ws.iter().map(|(c, _)| c.as_str()).collect(),
        }
    }

    fn label(&self, row: &[f64], index_of: &dyn Fn(&str) -> usize) -> u8 {
        match self {
            DecisionRule::Xor(a, b) => {
                u8::from((row[index_of(a)] != 0.0) != (row[index_of(b)] != 0.0))
            }
            DecisionRule::ThresholdGe(c, t) => u8::from(row[index_of(c)] >= *t),
            DecisionRule::LinearGe(ws, bias) => {
                let sum: f64 = ws.iter().map(|(c, w)| w * row[index_of(c)]).sum();
                u8::from(sum >= *bias)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub n_rows: usize,
    pub columns: Vec<ColumnSpec>,
    pub rule: DecisionRule,
    /// Probability of flipping each label after rule application.
    pub noise_rate: f64,
    pub seed: u64,
}

/// Generate a dataset whose target follows the decision rule, with
/// seeded label noise. Ordinal columns enumerate their category grid in
/// mixed-radix order (so 4 rows over two binary columns produce the full
/// truth table); numeric columns are sampled uniformly from [0,1).
pub fn synthesize(spec: &GeneratorSpec) -> Result<Dataset> {
    if spec.n_rows == 0 {
        return Err(Error::InvalidParameter("n_rows must be >= 1".into()));
    }
    for c in &spec.columns {
        c.validate()?;
    }
    let names: Vec<&str> = spec.columns.iter().map(|c| c.name.as_str()).collect();
    for c in spec.rule.columns() {
        if !names.contains(&c) {
            return Err(Error::UnknownFeature {
                name: c.to_string(),
            });
        }
    }
    if !(0.0..=1.0).contains(&spec.noise_rate) {
        return Err(Error::InvalidParameter(format!(
            "noise_rate must be in [0,1], got {}",
            spec.noise_rate
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let index_of = |name: &str| names.iter().position(|n| *n == name).unwrap();

    let mut rows = Vec::with_capacity(spec.n_rows);
    for i in 0..spec.n_rows {
        let mut row = Vec::with_capacity(spec.columns.len());
        let mut radix = i;
        for c in &spec.columns {
            match c.kind {
                ColumnKind::Ordinal => {
                    let k = c.categories.len();
                    row.push((radix % k) as f64);
                    radix /= k;
                }
                ColumnKind::Numeric => row.push(rng.gen::<f64>()),
            }
        }
        rows.push(row);
    }

    let mut target: Vec<u8> = rows
        .iter()
        .map(|r| spec.rule.label(r, &index_of))
        .collect();
    if spec.noise_rate > 0.0 {
        for t in target.iter_mut() {
            if rng.gen::<f64>() < spec.noise_rate {
                *t = 1 - *t;
            }
        }
    }

    Dataset::new(spec.columns.clone(), rows, target)
}

/// The 4-row XOR truth table over two binary ordinal columns.
pub fn xor_dataset() -> Dataset {
    synthesize(&GeneratorSpec {
        n_rows: 4,
        columns: vec![
            ColumnSpec::ordinal("x1", &["0", "1"]),
            ColumnSpec::ordinal("x2", &["0", "1"]),
        ],
        rule: DecisionRule::Xor("x1".into(), "x2".into()),
        noise_rate: 0.0,
        seed: 0,
    })
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_truth_table() {
        let d = xor_dataset();
        assert_eq!(d.row_count(), 4);
        let mut rows: Vec<(Vec<f64>, u8)> = d.rows.into_iter().zip(d.target).collect();
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert_eq!(
            rows,
            vec![
                (vec![0.0, 0.0], 0),
                (vec![0.0, 1.0], 1),
                (vec![1.0, 0.0], 1),
                (vec![1.0, 1.0], 0),
            ]
        );
    }

    #[test]
    fn stage_threshold_rule_matches_exactly() {
        let d = synthesize(&GeneratorSpec {
            n_rows: 200,
            columns: vec![ColumnSpec::ordinal(
                "Stage",
                &["Stage 0", "Stage I", "Stage II", "Stage III", "Stage IV"],
            )],
            rule: DecisionRule::ThresholdGe("Stage".into(), 2.0),
            noise_rate: 0.0,
            seed: 5,
        })
        .unwrap();
        for (row, &t) in d.rows.iter().zip(&d.target) {
            assert_eq!(t, u8::from(row[0] >= 2.0));
        }
    }

    #[test]
    fn noise_flip_count_in_binomial_interval() {
        // 1000 draws at p=0.1: 99% interval is roughly 100 +- 2.58*sqrt(90).
        let spec = GeneratorSpec {
            n_rows: 1000,
            columns: vec![ColumnSpec::numeric("x")],
            rule: DecisionRule::ThresholdGe("x".into(), 0.5),
            noise_rate: 0.1,
            seed: 11,
        };
        let noisy = synthesize(&spec).unwrap();
        let clean = synthesize(&GeneratorSpec {
            noise_rate: 0.0,
            ..spec
        })
        .unwrap();
        let flips = noisy
            .target
            .iter()
            .zip(&clean.target)
            .filter(|(a, b)| a != b)
            .count();
        assert!((76..=125).contains(&flips), "flips = {flips}");
    }

    #[test]
    fn rule_referencing_unknown_column() {
        let res = synthesize(&GeneratorSpec {
            n_rows: 4,
            columns: vec![ColumnSpec::numeric("x")],
            rule: DecisionRule::ThresholdGe("y".into(), 0.5),
            noise_rate: 0.0,
            seed: 0,
        });
        assert!(matches!(res, Err(Error::UnknownFeature { .. })));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = GeneratorSpec {
            n_rows: 50,
            columns: vec![ColumnSpec::numeric("x")],
            rule: DecisionRule::ThresholdGe("x".into(), 0.5),
            noise_rate: 0.2,
            seed: 9,
        };
        let a = synthesize(&spec).unwrap();
        let b = synthesize(&spec).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.target, b.target);
    }
}
