//! Provenance record written next to every output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of_bytes(path: &Path, data: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: sha256_hex(data),
            bytes: data.len() as u64,
        }
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce a command's outputs.
///
/// `argv` re-runs the command; `config` is the configuration it resolved to,
/// defaults included. Outputs are listed with digests so a re-run can be
/// checked byte for byte. No timestamps are recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub threads: usize,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Collects outputs as they are written, then emits the manifest.
pub struct OutputSet {
    manifest: RunManifest,
    manifest_path: PathBuf,
}

impl OutputSet {
    pub fn new(manifest: RunManifest, manifest_path: PathBuf) -> Self {
        Self {
            manifest,
            manifest_path,
        }
    }

    pub fn write(&mut self, path: &Path, data: &[u8]) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, data).map_err(|e| CliError::io(path, e))?;
        self.manifest.outputs.push(FileDigest::of_bytes(path, data));
        Ok(())
    }

    pub fn finish(self) -> CliResult<RunManifest> {
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        let path = &self.manifest_path;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        fs::write(path, text).map_err(|e| CliError::io(path, e))?;
        Ok(self.manifest)
    }
}
