//! Tabular datasets: typed columns, ordinal encoding, feature sets,
//! train/test splitting and synthetic data generation.

mod load;
mod split;
mod synth;

pub use load::{load_csv, load_feature_set, LoadSummary};
pub use split::{split, SplitPair};
pub use synth::{synthesize, xor_dataset, DecisionRule, GeneratorSpec};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Encoded value marking an empty cell. Missing values are routed to the
/// left child at every split.
pub const MISSING: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Ordinal,
}

/// Declared type of one dataset column. Ordinal columns carry their
/// category labels in encoding order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl ColumnSpec {
    pub fn numeric(name: &str) -> Self {
        ColumnSpec {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
            categories: Vec::new(),
        }
    }

    pub fn ordinal(name: &str, categories: &[&str]) -> Self {
        ColumnSpec {
            name: name.to_string(),
            kind: ColumnKind::Ordinal,
            categories: categories.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ColumnKind::Numeric => {
                if !self.categories.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "numeric column {:?} must not list categories",
                        self.name
                    )));
                }
            }
            ColumnKind::Ordinal => {
                if self.categories.len() < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "ordinal column {:?} needs at least 2 categories",
                        self.name
                    )));
                }
                let mut seen = HashSet::new();
                for c in &self.categories {
                    if !seen.insert(c) {
                        return Err(Error::InvalidParameter(format!(
                            "ordinal column {:?} lists duplicate category {:?}",
                            self.name, c
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Encode a category label to its index, if this column declares it.
    pub fn encode(&self, label: &str) -> Option<f64> {
        self.categories
            .iter()
            .position(|c| c == label)
            .map(|i| i as f64)
    }

    /// Decode an encoded ordinal value back to its category label.
    pub fn decode(&self, value: f64) -> Option<&str> {
        if value < 0.0 {
            return None;
        }
        self.categories.get(value as usize).map(|s| s.as_str())
    }
}

/// An encoded tabular dataset with a binary target.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub columns: Vec<ColumnSpec>,
    /// Row-major encoded values; ordinal cells hold their category index,
    /// empty cells hold [`MISSING`].
    pub rows: Vec<Vec<f64>>,
    /// Class labels, 0 or 1.
    pub target: Vec<u8>,
}

impl Dataset {
    pub fn new(columns: Vec<ColumnSpec>, rows: Vec<Vec<f64>>, target: Vec<u8>) -> Result<Self> {
        for c in &columns {
            c.validate()?;
        }
        if rows.len() != target.len() {
            return Err(Error::LengthMismatch {
                a: rows.len(),
                b: target.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::ArityMismatch {
                    expected: columns.len(),
                    got: row.len(),
                });
            }
            for (v, c) in row.iter().zip(&columns) {
                if c.kind == ColumnKind::Ordinal
                    && *v != MISSING
                    && !(*v >= 0.0 && *v < c.categories.len() as f64)
                {
                    return Err(Error::InvalidParameter(format!(
                        "row {i}: encoded value {v} out of range for ordinal column {:?}",
                        c.name
                    )));
                }
            }
        }
        for &t in &target {
            if t > 1 {
                return Err(Error::InvalidParameter(format!(
                    "target label {t} is not binary"
                )));
            }
        }
        Ok(Dataset {
            columns,
            rows,
            target,
        })
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownFeature {
                name: name.to_string(),
            })
    }

    /// Values of one column across all rows.
    pub fn column_values(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.target.iter().filter(|&&t| t == 1).count();
        (self.target.len() - ones, ones)
    }

    /// Dataset restricted to the rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            target: indices.iter().map(|&i| self.target[i]).collect(),
        }
    }
}

/// A named, ordered subset of dataset columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSet {
    pub name: String,
    pub features: Vec<String>,
}

impl FeatureSet {
    pub fn new(name: &str, features: &[&str]) -> Result<Self> {
        let fs = FeatureSet {
            name: name.to_string(),
            features: features.iter().map(|s| s.to_string()).collect(),
        };
        fs.validate()?;
        Ok(fs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "feature set {:?} is empty",
                self.name
            )));
        }
        let mut seen = HashSet::new();
        for f in &self.features {
            if !seen.insert(f) {
                return Err(Error::InvalidParameter(format!(
                    "feature set {:?} lists {f:?} twice",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Project a dataset onto the columns of a feature set, in feature-set
/// order. The target is unchanged.
pub fn select_features(d: &Dataset, fs: &FeatureSet) -> Result<Dataset> {
    fs.validate()?;
    let indices: Vec<usize> = fs
        .features
        .iter()
        .map(|f| d.column_index(f))
        .collect::<Result<_>>()?;
    let columns = indices.iter().map(|&i| d.columns[i].clone()).collect();
    let rows = d
        .rows
        .iter()
        .map(|r| indices.iter().map(|&i| r[i]).collect())
        .collect();
    Dataset::new(columns, rows, d.target.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        let columns = vec![
            ColumnSpec::numeric("Age"),
            ColumnSpec::ordinal("Stage", &["Stage I", "Stage II"]),
        ];
        let rows = vec![
            vec![40.0, 0.0],
            vec![55.0, 1.0],
            vec![61.0, 0.0],
            vec![70.0, 1.0],
        ];
        Dataset::new(columns, rows, vec![0, 1, 0, 1]).unwrap()
    }

    #[test]
    fn ordinal_encode_decode_round_trip() {
        let d = toy();
        let stage = &d.columns[1];
        for label in &stage.categories {
            let v = stage.encode(label).unwrap();
            assert_eq!(stage.decode(v).unwrap(), label);
        }
        assert!(stage.encode("Stage V").is_none());
        assert!(stage.decode(MISSING).is_none());
    }

    #[test]
    fn select_features_reorders_and_is_idempotent() {
        let d = toy();
        let fs = FeatureSet::new("one", &["Stage"]).unwrap();
        let s = select_features(&d, &fs).unwrap();
        assert_eq!(s.feature_names(), vec!["Stage"]);
        assert_eq!(s.rows[1], vec![1.0]);
        assert_eq!(s.target, d.target);
        let s2 = select_features(&s, &fs).unwrap();
        assert_eq!(s2.rows, s.rows);
    }

    #[test]
    fn select_features_unknown_name() {
        let d = toy();
        let fs = FeatureSet::new("bad", &["Tumour"]).unwrap();
        match select_features(&d, &fs) {
            Err(Error::UnknownFeature { name }) => assert_eq!(name, "Tumour"),
            other => panic!("expected unknown-feature error, got {other:?}"),
        }
    }

    #[test]
    fn ordinal_needs_two_categories() {
        let c = ColumnSpec::ordinal("Stage", &["only"]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn dataset_rejects_out_of_range_ordinal() {
        let columns = vec![ColumnSpec::ordinal("Stage", &["a", "b"])];
        let res = Dataset::new(columns, vec![vec![5.0]], vec![0]);
        assert!(res.is_err());
    }
}
