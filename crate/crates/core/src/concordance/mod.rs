//! Ordinal relevance bands, rank-to-weight mapping, and Weighted
//! Jaccard similarity matrices between explainability methods and
//! human reference rankings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::FeatureSet;
use crate::error::{Error, Result};
use crate::explain::ImportanceVector;

/// Relevance band: 1 is highly relevant, 3 barely relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rank {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "")]
    Unranked,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::One => write!(f, "1"),
            Rank::Two => write!(f, "2"),
            Rank::Three => write!(f, "3"),
            Rank::Unranked => Ok(()),
        }
    }
}

impl Rank {
    pub fn parse(s: &str, row: usize) -> Result<Rank> {
        match s.trim() {
            "" => Ok(Rank::Unranked),
            "1" => Ok(Rank::One),
            "2" => Ok(Rank::Two),
            "3" => Ok(Rank::Three),
            other => Err(Error::InvalidRank {
                row,
                value: other.to_string(),
            }),
        }
    }
}

/// A labeled assignment of relevance bands over a feature universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankAssignment {
    pub label: String,
    pub ranks: BTreeMap<String, Rank>,
}

/// Weights per rank band; the default mapping is 1 -> 3, 2 -> 2,
/// 3 -> 1, unranked -> 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightMap {
    pub rank1: f64,
    pub rank2: f64,
    pub rank3: f64,
    pub unranked: f64,
}

impl Default for WeightMap {
    fn default() -> Self {
        WeightMap {
            rank1: 3.0,
            rank2: 2.0,
            rank3: 1.0,
            unranked: 0.0,
        }
    }
}

impl WeightMap {
    pub fn weight(&self, rank: Rank) -> f64 {
        match rank {
            Rank::One => self.rank1,
            Rank::Two => self.rank2,
            Rank::Three => self.rank3,
            Rank::Unranked => self.unranked,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = [self.rank1, self.rank2, self.rank3, self.unranked];
        if w.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "weight map entries must be finite and non-negative".into(),
            ));
        }
        if !(self.rank1 > self.rank2 && self.rank2 > self.rank3 && self.rank3 > self.unranked) {
            return Err(Error::InvalidParameter(
                "weight map must be strictly decreasing in rank".into(),
            ));
        }
        Ok(())
    }
}

/// Non-negative weights per feature, derived from a rank assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub label: String,
    pub weights: BTreeMap<String, f64>,
}

/// Labeled symmetric matrix of pairwise Weighted Jaccard coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

/// Score-to-band policy. Scores are first divided by their maximum;
/// thresholds then cut the normalized scores into bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum DiscretizePolicy {
    /// Fixed normalized thresholds: s >= t1 -> 1, s >= t2 -> 2,
    /// s >= floor -> 3, below -> unranked.
    Fixed { t1: f64, t2: f64, floor: f64 },
    /// Thresholds taken as the q1/q2 quantiles of the normalized
    /// nonzero scores.
    Quantile { q1: f64, q2: f64, floor: f64 },
}

impl Default for DiscretizePolicy {
    fn default() -> Self {
        DiscretizePolicy::Fixed {
            t1: 2.0 / 3.0,
            t2: 1.0 / 3.0,
            floor: 0.05,
        }
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

/// Discretize importance scores into relevance bands. An all-zero
/// vector maps to all-unranked.
pub fn discretize(iv: &ImportanceVector, policy: DiscretizePolicy) -> Result<RankAssignment> {
    for (name, &s) in &iv.scores {
        if !s.is_finite() {
            return Err(Error::NonFiniteScore {
                feature: name.clone(),
            });
        }
        if s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "negative score for {name:?}; floor negatives before discretizing"
            )));
        }
    }
    let label = format!("{}-{}", iv.method.as_str().to_uppercase(), iv.model_id);
    let max = iv.scores.values().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Ok(RankAssignment {
            label,
            ranks: iv.scores.keys().map(|k| (k.clone(), Rank::Unranked)).collect(),
        });
    }

    let (t1, t2, floor) = match policy {
        DiscretizePolicy::Fixed { t1, t2, floor } => (t1, t2, floor),
        DiscretizePolicy::Quantile { q1, q2, floor } => {
            let mut nonzero: Vec<f64> = iv
                .scores
                .values()
                .filter(|&&v| v > 0.0)
                .map(|&v| v / max)
                .collect();
            nonzero.sort_by(f64::total_cmp);
            (quantile(&nonzero, q1), quantile(&nonzero, q2), floor)
        }
    };
    if !(t1 >= t2 && t2 >= floor && floor >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thresholds must satisfy t1 >= t2 >= floor >= 0 (got {t1}, {t2}, {floor})"
        )));
    }

    let ranks = iv
        .scores
        .iter()
        .map(|(name, &score)| {
            let s = score / max;
            let rank = if s >= t1 {
                Rank::One
            } else if s >= t2 {
                Rank::Two
            } else if s >= floor {
                Rank::Three
            } else {
                Rank::Unranked
            };
            (name.clone(), rank)
        })
        .collect();
    Ok(RankAssignment { label, ranks })
}

/// Map bands to weights elementwise.
pub fn ranks_to_weights(ra: &RankAssignment, map: &WeightMap) -> Result<WeightVector> {
    map.validate()?;
    Ok(WeightVector {
        label: ra.label.clone(),
        weights: ra
            .ranks
            .iter()
            .map(|(k, &r)| (k.clone(), map.weight(r)))
            .collect(),
    })
}

/// Load a reference ranking CSV (`feature,rank`; rank blank or 1/2/3).
/// Feature names resolve against the universe, optionally through an
/// abbreviation map; universe features absent from the file are
/// unranked. `#` lines are comments.
pub fn load_reference_ranking(
    path: &Path,
    universe: &FeatureSet,
    aliases: &BTreeMap<String, String>,
) -> Result<RankAssignment> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Csv(e),
        })?;

    let mut ranks: BTreeMap<String, Rank> = universe
        .features
        .iter()
        .map(|f| (f.clone(), Rank::Unranked))
        .collect();

    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let raw_name = record.get(0).unwrap_or("").trim();
        if raw_name.is_empty() {
            continue;
        }
        let name = aliases.get(raw_name).map(|s| s.as_str()).unwrap_or(raw_name);
        if !universe.features.iter().any(|f| f == name) {
            return Err(Error::UnknownFeature {
                name: raw_name.to_string(),
            });
        }
        let rank = Rank::parse(record.get(1).unwrap_or(""), i + 1)?;
        ranks.insert(name.to_string(), rank);
    }

    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "reference".into());
    Ok(RankAssignment { label, ranks })
}

/// Write a rank assignment in the rank CSV format, with optional audit
/// comment lines.
pub fn rank_csv(ra: &RankAssignment, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("feature,rank\n");
    for (feature, rank) in &ra.ranks {
        out.push_str(&format!("{feature},{rank}\n"));
    }
    out
}

/// Plain Jaccard similarity of two feature sets. Two empty sets are
/// defined as identical (similarity 1).
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Weighted Jaccard similarity: sum of elementwise minima over sum of
/// elementwise maxima. Two all-zero vectors are defined as identical.
pub fn weighted_jaccard(x: &WeightVector, y: &WeightVector) -> Result<f64> {
    if x.weights.keys().ne(y.weights.keys()) {
        return Err(Error::UniverseMismatch(format!(
            "{:?} and {:?} cover different features",
            x.label, y.label
        )));
    }
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    for (xv, yv) in x.weights.values().zip(y.weights.values()) {
        if *xv < 0.0 || *yv < 0.0 {
            return Err(Error::InvalidParameter(
                "weighted jaccard requires non-negative weights".into(),
            ));
        }
        min_sum += xv.min(*yv);
        max_sum += xv.max(*yv);
    }
    if max_sum == 0.0 {
        return Ok(1.0);
    }
    Ok(min_sum / max_sum)
}

/// Pairwise Weighted Jaccard over a shared universe.
pub fn similarity_matrix(vectors: &[WeightVector]) -> Result<SimilarityMatrix> {
    if vectors.len() < 2 {
        return Err(Error::InvalidParameter(
            "similarity matrix needs at least 2 weight vectors".into(),
        ));
    }
    let mut labels = BTreeSet::new();
    for v in vectors {
        if !labels.insert(v.label.clone()) {
            return Err(Error::InvalidParameter(format!(
                "duplicate label {:?}",
                v.label
            )));
        }
    }
    let n = vectors.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
        for j in i + 1..n {
            let s = weighted_jaccard(&vectors[i], &vectors[j])?;
            values[i][j] = s;
            values[j][i] = s;
        }
    }
    Ok(SimilarityMatrix {
        labels: vectors.iter().map(|v| v.label.clone()).collect(),
        values,
    })
}

impl SimilarityMatrix {
    /// Cell by labels.
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }

    /// CSV display form with 2-decimal rounding; full precision is kept
    /// in the JSON artifact.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("label,{}\n", self.labels.join(",")));
        for (label, row) in self.labels.iter().zip(&self.values) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
            out.push_str(&format!("{label},{}\n", cells.join(",")));
        }
        out
    }
}
