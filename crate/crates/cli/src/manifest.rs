//! Run manifest: config hash, per-output checksums, command-specific
//! results and wall-clock timings. Checksums are reproducible; timings are
//! informational and excluded from any determinism comparison.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const ARTIFACT_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub artifact_version: String,
    pub command: String,
    pub config_sha256: String,
    pub outputs: Vec<OutputEntry>,
    /// Command-specific scalar results (solved values, exponents, metrics).
    pub results: serde_json::Map<String, serde_json::Value>,
    pub warnings: Vec<String>,
    pub timings_ms: serde_json::Map<String, serde_json::Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn new(command: &str, config_text: &str) -> Self {
        Self {
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            config_sha256: sha256_hex(config_text.as_bytes()),
            outputs: Vec::new(),
            results: serde_json::Map::new(),
            warnings: Vec::new(),
            timings_ms: serde_json::Map::new(),
        }
    }

    /// Write `bytes` to `out_dir/name` and record its checksum.
    pub fn write_output(&mut self, out_dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes)?;
        self.outputs.push(OutputEntry {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(path)
    }

    pub fn record(&mut self, key: &str, value: serde_json::Value) {
        self.results.insert(key.to_string(), value);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn record_timing(&mut self, key: &str, ms: f64) {
        self.timings_ms
            .insert(key.to_string(), serde_json::json!(ms));
    }

    pub fn save(&self, out_dir: &Path) -> std::io::Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self).expect("manifest serialization");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_round_trips_as_json() {
        let mut m = Manifest::new("simulate", "command = \"simulate\"");
        m.record("h_drift", serde_json::json!(1e-12));
        let text = serde_json::to_string(&m).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["command"], "simulate");
        assert_eq!(back["artifact_version"], ARTIFACT_VERSION);
    }
}
