//! Run manifests: what was run, with which configuration, producing which files.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Hex SHA-256 of the canonical configuration text.
pub fn config_hash(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub config_hash: String,
    /// Canonical configuration; `config_hash` is computed over exactly these bytes.
    pub config: String,
    pub seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: String, seed: u64, outputs: Vec<String>, started_unix: u64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: std::env::args().collect(),
            config_hash: config_hash(&config),
            config,
            seed,
            started_unix,
            finished_unix: unix_now(),
            outputs,
        }
    }

    /// The embedded configuration still hashes to the recorded value.
    pub fn is_consistent(&self) -> bool {
        config_hash(&self.config) == self.config_hash
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        let m: Self = serde_json::from_str(&text)?;
        if !m.is_consistent() {
            return Err(Error::HashMismatch { expected: config_hash(&m.config), found: m.config_hash });
        }
        Ok(m)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(Error::io(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_sha256_hex() {
        assert_eq!(config_hash(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn tampered_config_is_detected() {
        let mut m = RunManifest::new("{\"a\":1}".into(), 3, vec![], 0);
        assert!(m.is_consistent());
        m.config.push(' ');
        assert!(!m.is_consistent());
    }
}
