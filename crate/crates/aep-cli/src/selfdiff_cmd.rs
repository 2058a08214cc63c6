//! The `selfdiff` subcommand: estimate d_s on the configured density grid,
//! build the monotone table and persist it as CSV with a JSON sidecar.

use crate::config::RunConfig;
use aep_core::rng::substream_indexed;
use aep_core::selfdiff::{estimate_ds, DsEstimate, DsTable};
use aep_core::{Error, Result};
use rand::Rng;
use serde_json::json;

pub fn run_selfdiff(cfg: &RunConfig, config_text: &str) -> Result<DsTable> {
    let out = &cfg.paths.output;
    std::fs::create_dir_all(out)?;
    let sd = &cfg.selfdiff;
    let estimates: Vec<DsEstimate> = sd
        .densities
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let seed: u64 = substream_indexed(cfg.model.seed, "selfdiff-density", i as u64).gen();
            estimate_ds(rho, sd.n, sd.t_end, sd.replicas, seed)
        })
        .collect::<Result<_>>()?;
    let table = DsTable::from_estimates(&estimates)?;
    // in-run assertions: pinned endpoints and the two-sided comparison with
    // 1 - rho (constants well inside the proven-bound regime)
    let (rho, ds, _) = table.grid();
    if ds[0] != 1.0 || *ds.last().unwrap() != 0.0 {
        return Err(Error::InvalidParameter("endpoints not pinned".into()));
    }
    for (&r, &v) in rho.iter().zip(ds).filter(|(&r, _)| r < 1.0) {
        let ratio = v / (1.0 - r);
        if !(1.0 / 3.0..=3.0).contains(&ratio) {
            return Err(Error::InvalidParameter(format!(
                "d_s({r}) = {v} outside the expected band around 1 - rho"
            )));
        }
    }
    table.save(&out.join("ds_table.csv"))?;
    std::fs::write(
        out.join("estimates.json"),
        serde_json::to_string_pretty(&estimates)?,
    )?;
    crate::manifest::write_manifest(
        out,
        "selfdiff",
        config_text,
        cfg.model.seed,
        json!({ "densities": sd.densities, "n": sd.n, "replicas": sd.replicas }),
    )?;
    Ok(table)
}
