use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Resolved;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to replay a run.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub args: Vec<String>,
    pub config_path: Option<String>,
    pub output_dir: String,
    pub tool_version: &'static str,
    pub seeds: &'a [u64],
    pub wall_clock_seconds: f64,
    /// SHA-256 of the config file bytes followed by the resolved settings JSON.
    pub input_hash: String,
    pub resolved: &'a Resolved,
    pub outputs: Vec<String>,
}

pub fn input_hash(config_bytes: Option<&[u8]>, resolved: &Resolved) -> Result<String, CliError> {
    let mut h = Sha256::new();
    if let Some(b) = config_bytes {
        h.update(b);
    }
    h.update(serde_json::to_vec(resolved).map_err(|e| CliError::Io(e.to_string()))?);
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(dir.join(MANIFEST_FILE), text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write manifest in {}: {e}", dir.display())))
}
