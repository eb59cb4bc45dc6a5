use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StuckVertex {
    pub vertex: usize,
    pub reason: String,
}

/// Record written next to every run's outputs. `config` holds the full
/// command arguments, so `mixnet replay` can re-execute the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub duration_secs: f64,
    /// Birth-death jumps per vertex chain (learn only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jumps: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stuck: Vec<StuckVertex>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = io::read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: bad manifest: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }
}
