//! CSV ingestion against a declared schema.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::data::{ColumnKind, ColumnSpec, Dataset, FeatureSet, MISSING};
use crate::error::{Error, Result};

/// What happened during a CSV load, emitted as JSON next to the dataset.
#[derive(Debug, Clone, Serialize)]
pub struct LoadSummary {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub missing_cells_per_column: BTreeMap<String, usize>,
}

/// Load a UTF-8, comma-separated, header-first CSV into an encoded
/// dataset. Ordinal cells are encoded by category index; empty cells
/// become the missing sentinel. Rows with an empty target cell are
/// dropped and accounted for in the summary.
pub fn load_csv(
    path: &Path,
    schema: &[ColumnSpec],
    target_column: &str,
) -> Result<(Dataset, LoadSummary)> {
    for c in schema {
        c.validate()?;
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => Error::Csv(e),
        })?;

    let headers = reader.headers()?.clone();
    let header_index = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                name: name.to_string(),
            })
    };
    let col_positions: Vec<usize> = schema
        .iter()
        .map(|c| header_index(&c.name))
        .collect::<Result<_>>()?;
    let target_pos = header_index(target_column)?;

    let mut rows = Vec::new();
    let mut target = Vec::new();
    let mut rows_read = 0usize;
    let mut missing: BTreeMap<String, usize> =
        schema.iter().map(|c| (c.name.clone(), 0)).collect();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        rows_read += 1;
        let raw_target = record.get(target_pos).unwrap_or("").trim();
        if raw_target.is_empty() {
            continue;
        }
        let label: u8 = raw_target.parse().map_err(|_| Error::NonNumericCell {
            column: target_column.to_string(),
            row: row_idx + 1,
            value: raw_target.to_string(),
        })?;
        if label > 1 {
            return Err(Error::InvalidParameter(format!(
                "row {}: target label {label} is not binary",
                row_idx + 1
            )));
        }

        let mut row = Vec::with_capacity(schema.len());
        for (spec, &pos) in schema.iter().zip(&col_positions) {
            let cell = record.get(pos).unwrap_or("").trim();
            if cell.is_empty() {
                *missing.get_mut(&spec.name).unwrap() += 1;
                row.push(MISSING);
                continue;
            }
            let value = match spec.kind {
                ColumnKind::Numeric => cell.parse::<f64>().map_err(|_| Error::NonNumericCell {
                    column: spec.name.clone(),
                    row: row_idx + 1,
                    value: cell.to_string(),
                })?,
                ColumnKind::Ordinal => {
                    spec.encode(cell).ok_or_else(|| Error::UnknownCategory {
                        column: spec.name.clone(),
                        row: row_idx + 1,
                        value: cell.to_string(),
                    })?
                }
            };
            row.push(value);
        }
        rows.push(row);
        target.push(label);
    }

    let rows_kept = rows.len();
    let dataset = Dataset::new(schema.to_vec(), rows, target)?;
    Ok((
        dataset,
        LoadSummary {
            rows_read,
            rows_kept,
            missing_cells_per_column: missing,
        },
    ))
}

/// Load a feature-set file: one column name per line, `#` starts a
/// comment, blank lines ignored. The set is named after the file stem.
pub fn load_feature_set(path: &Path) -> Result<FeatureSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let features: Vec<String> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.to_string())
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "feature-set".to_string());
    let fs = FeatureSet { name, features };
    fs.validate()?;
    Ok(fs)
}
