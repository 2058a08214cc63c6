//! The `exactcheck` subcommand: run the dense verification suite and emit
//! one JSON verdict per check.

use aep_core::exactcheck::{run_all, CheckVerdict};
use aep_core::Result;
use serde_json::json;
use std::path::Path;

pub fn run_exactcheck(seed: u64, out: &Path, config_text: &str) -> Result<Vec<CheckVerdict>> {
    std::fs::create_dir_all(out)?;
    let verdicts = run_all(seed)?;
    std::fs::write(
        out.join("verdicts.json"),
        serde_json::to_string_pretty(&verdicts)?,
    )?;
    crate::manifest::write_manifest(
        out,
        "exactcheck",
        config_text,
        seed,
        json!({ "checks": verdicts.len() }),
    )?;
    Ok(verdicts)
}
