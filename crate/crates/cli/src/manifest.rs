//! Run manifests: enough provenance to re-run a configuration and verify
//! outputs byte for byte.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Hash of the fully resolved configuration (after CLI overrides).
    pub config_hash: String,
    /// Hash of the raw input config file, when one was given.
    pub inputs_hash: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub seed: u64,
    pub version: String,
    /// Checksums of every emitted file except the manifest itself.
    pub files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn now_unix() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}
