//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by dataset handling, model training, explanation and
/// concordance computation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column {column}, row {row}: unknown category value {value:?}")]
    UnknownCategory {
        column: String,
        row: usize,
        value: String,
    },

    #[error("column {column}, row {row}: non-numeric cell {value:?}")]
    NonNumericCell {
        column: String,
        row: usize,
        value: String,
    },

    #[error("missing column {name:?} in input")]
    MissingColumn { name: String },

    #[error("unknown feature {name:?}")]
    UnknownFeature { name: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset is empty or degenerate: {0}")]
    DegenerateDataset(String),

    #[error("training target contains a single class; the prior log-odds is infinite")]
    SingleClassTarget,

    #[error("row has {got} values but the model expects {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("input vectors have mismatched lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },

    #[error("unsupported model format version {found:?} (expected {expected:?})")]
    FormatVersion { found: String, expected: String },

    #[error("malformed model document: {0}")]
    MalformedModel(String),

    #[error("row {row}: rank value {value:?} is not 1, 2, 3 or blank")]
    InvalidRank { row: usize, value: String },

    #[error("feature universe mismatch: {0}")]
    UniverseMismatch(String),

    #[error("non-finite importance score for feature {feature:?}")]
    NonFiniteScore { feature: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for input/validation failures,
    /// 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
