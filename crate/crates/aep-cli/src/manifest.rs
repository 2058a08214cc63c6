//! Run manifests: every output directory records the exact configuration
//! text, its digest, the code version and the root seed, so a run can be
//! reproduced from the manifest alone.

use aep_core::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub version: String,
    pub config_sha256: String,
    /// Verbatim configuration text (the reproduction input).
    pub config: String,
    pub seed: u64,
    /// Producer-specific details (sizes, schedules, artifact names).
    pub extra: serde_json::Value,
}

pub fn config_digest(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    format!("{:x}", h.finalize())
}

/// Writes `manifest.json` into the output directory.
pub fn write_manifest(
    out_dir: &Path,
    subcommand: &str,
    config_text: &str,
    seed: u64,
    extra: serde_json::Value,
) -> Result<Manifest> {
    let manifest = Manifest {
        subcommand: subcommand.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: config_digest(config_text),
        config: config_text.into(),
        seed,
        extra,
    };
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

pub fn read_manifest(out_dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(out_dir.join("manifest.json"))?;
    Ok(serde_json::from_str(&text)?)
}
