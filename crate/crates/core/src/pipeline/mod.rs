//! Configuration-driven pipeline: chains loading, training, evaluation,
//! explanation, rank discretization and similarity matrices, and emits
//! a digest-verified artifact tree.

mod commands;
mod config;
mod manifest;

pub use commands::{
    cmd_evaluate, cmd_explain, cmd_rank, cmd_report, cmd_similarity, cmd_train, EvaluateArgs,
    ExplainArgs, RankArgs, SimilarityArgs, TrainArgs,
};
pub use config::{load_config, FeatureSetRef, ModelSpec, PipelineConfig, ReferenceRef};
pub use manifest::{ArtifactRecord, ArtifactWriter, RunManifest};

use std::path::Path;

use crate::data::ColumnSpec;
use crate::error::{Error, Result};

/// Read a JSON column schema (an array of column specs).
pub fn load_schema(path: &Path) -> Result<Vec<ColumnSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let columns: Vec<ColumnSpec> = serde_json::from_str(&text)?;
    if columns.is_empty() {
        return Err(Error::Config(format!(
            "schema {} declares no columns",
            path.display()
        )));
    }
    for c in &columns {
        c.validate()?;
    }
    Ok(columns)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
