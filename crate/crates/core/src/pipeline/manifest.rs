//! Run manifest: every emitted artifact listed with a content digest so
//! that reruns can be compared byte-for-byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Digest algorithm used for every entry, named for forward
    /// compatibility.
    pub digest_algorithm: String,
    pub tool_version: String,
    pub config_sha256: String,
    /// Unix timestamp of manifest assembly; informational only and
    /// excluded from any digest comparison.
    pub created_unix: u64,
    pub artifacts: Vec<ArtifactRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes artifacts under a root directory and records their digests.
pub struct ArtifactWriter {
    root: PathBuf,
    records: Vec<ArtifactRecord>,
}

impl ArtifactWriter {
    pub fn new(root: &Path) -> Self {
        ArtifactWriter {
            root: root.to_path_buf(),
            records: Vec::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write one artifact at a path relative to the root.
    pub fn write(&mut self, relative: &str, text: &str) -> Result<PathBuf> {
        let full = self.root.join(relative);
        crate::pipeline::write_text(&full, text)?;
        self.records.push(ArtifactRecord {
            path: relative.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(full)
    }

    /// Assemble the manifest (artifact list sorted by path) and write it
    /// as `manifest.json`. The manifest itself is not listed.
    pub fn finish(mut self, config_sha256: &str) -> Result<RunManifest> {
        self.records.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            digest_algorithm: "sha256".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: config_sha256.to_string(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            artifacts: self.records,
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        crate::pipeline::write_text(&self.root.join("manifest.json"), &text)?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_hex() {
        let a = sha256_hex(b"hello");
        assert_eq!(
            a,
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
    }

    #[test]
    fn writer_records_all_artifacts_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path());
        w.write("b/second.txt", "2").unwrap();
        w.write("a/first.txt", "1").unwrap();
        let manifest = w.finish("cfg").unwrap();
        let paths: Vec<&str> = manifest.artifacts.iter().map(|a| a.path.as_str()).collect();
        assert_eq!(paths, vec!["a/first.txt", "b/second.txt"]);
        assert!(dir.path().join("manifest.json").exists());
        assert_eq!(manifest.digest_algorithm, "sha256");
    }
}
