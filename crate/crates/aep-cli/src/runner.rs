//! Replica orchestration shared by `simulate` and `compare`: sample the
//! initial measure, run the chain, take coarse-grained snapshots on the
//! schedule and record scalar series. Replicas parallelize over seeds; the
//! reducer indexes results by replica, so merging is order-insensitive.

use crate::config::RunConfig;
use aep_core::dynamics::{ModelParams, SimulationState};
use aep_core::io;
use aep_core::lattice::{sample_product_measure, Configuration, TorusGeometry};
use aep_core::observables::{field_snapshot, full_cluster_fraction, FieldSnapshot};
use aep_core::rng::substream_indexed;
use aep_core::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;
use std::path::Path;

pub struct ReplicaResult {
    pub snapshots: Vec<FieldSnapshot>,
    /// One row per scheduled time; columns as in [`series_columns`].
    pub series: Vec<Vec<f64>>,
    pub final_config: Configuration,
    pub events: u64,
}

pub fn series_columns(cluster_p: &[usize]) -> Vec<String> {
    let mut cols = vec![
        "time".to_string(),
        "density".to_string(),
        "mag_x".to_string(),
        "mag_y".to_string(),
    ];
    cols.extend(cluster_p.iter().map(|p| format!("cluster_p{p}")));
    cols
}

/// Runs one replica on an `n`-torus with snapshots on a `grid` x `grid`
/// block decomposition. Deterministic given the root seed and replica index.
pub fn run_replica(cfg: &RunConfig, n: usize, grid: usize, replica: u64) -> Result<ReplicaResult> {
    let profile = cfg.build_profile()?;
    let mut init_rng = substream_indexed(cfg.model.seed, "init", replica);
    let config = sample_product_measure(&profile, TorusGeometry::new(n), &mut init_rng)?;
    let dyn_seed: u64 = substream_indexed(cfg.model.seed, "replica-dynamics", replica).gen();
    let params = ModelParams::new(n, cfg.model.lambda, cfg.model.beta, cfg.angle_kind()?)?
        .with_seed(dyn_seed)
        .with_horizon(cfg.model.t_end)
        .with_budget(u64::MAX);
    let mut sim = SimulationState::new(params, config)?;

    let block = n / grid;
    let bins = cfg.observation.bins;
    let mut snapshots = Vec::new();
    let mut series = Vec::new();
    let mut events = 0;
    for &t in &cfg.schedule() {
        let report = sim.advance(t - sim.time());
        events += report.events;
        if !report.completed {
            return Err(Error::InvalidParameter(format!(
                "event budget exhausted at t = {}",
                sim.time()
            )));
        }
        let c = sim.configuration();
        snapshots.push(field_snapshot(c, t, block, bins)?);
        let sites = (n * n) as f64;
        let (mut mx, mut my) = (0.0, 0.0);
        for &site in c.particle_sites() {
            let theta = c.angle_at(site as usize);
            mx += theta.cos();
            my += theta.sin();
        }
        let mut row = vec![
            t,
            c.particle_count() as f64 / sites,
            mx / sites,
            my / sites,
        ];
        row.extend(
            cfg.observation
                .cluster_p
                .iter()
                .map(|&p| full_cluster_fraction(c, p)),
        );
        series.push(row);
    }
    Ok(ReplicaResult {
        snapshots,
        series,
        final_config: sim.configuration().clone(),
        events,
    })
}

/// Runs all replicas (in parallel) and returns them indexed by replica.
pub fn run_replicas(cfg: &RunConfig, n: usize, grid: usize) -> Result<Vec<ReplicaResult>> {
    (0..cfg.model.replicas as u64)
        .into_par_iter()
        .map(|r| run_replica(cfg, n, grid, r))
        .collect()
}

/// Element-wise mean of per-replica series (all replicas share the schedule).
pub fn merge_series(replicas: &[ReplicaResult]) -> Vec<Vec<f64>> {
    let rows = replicas[0].series.len();
    let cols = replicas[0].series[0].len();
    let mut merged = vec![vec![0.0; cols]; rows];
    for rep in replicas {
        for (acc, row) in merged.iter_mut().zip(&rep.series) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
    }
    let k = replicas.len() as f64;
    for row in &mut merged {
        for v in row.iter_mut() {
            *v /= k;
        }
    }
    // the time column is identical across replicas; restore it exactly
    for (row, src) in merged.iter_mut().zip(&replicas[0].series) {
        row[0] = src[0];
    }
    merged
}

/// The `simulate` subcommand: snapshots, per-replica and merged series, and
/// the manifest, all under `paths.output`.
pub fn run_simulate(cfg: &RunConfig, config_text: &str) -> Result<()> {
    let out = &cfg.paths.output;
    std::fs::create_dir_all(out)?;
    let n = cfg.model.n;
    let grid = cfg.observation.grid;
    let replicas = run_replicas(cfg, n, grid)?;
    let columns = series_columns(&cfg.observation.cluster_p);
    let col_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    for (r, rep) in replicas.iter().enumerate() {
        let dir = out.join(format!("replica_{r}"));
        std::fs::create_dir_all(&dir)?;
        for (i, snap) in rep.snapshots.iter().enumerate() {
            write_snapshot_files(&dir, i, snap)?;
        }
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join("series.csv"))?);
        io::write_series_csv(&mut w, &col_refs, &rep.series)?;
        io::save_snapshot(
            &dir.join("final_config.ndjson"),
            &rep.final_config,
            cfg.model.seed,
            cfg.model.t_end,
        )?;
    }
    let merged = merge_series(&replicas);
    let mut w = std::io::BufWriter::new(std::fs::File::create(out.join("merged_series.csv"))?);
    io::write_series_csv(&mut w, &col_refs, &merged)?;
    crate::manifest::write_manifest(
        out,
        "simulate",
        config_text,
        cfg.model.seed,
        json!({
            "n": n,
            "replicas": cfg.model.replicas,
            "schedule": cfg.schedule(),
            "events": replicas.iter().map(|r| r.events).collect::<Vec<_>>(),
        }),
    )?;
    Ok(())
}

fn write_snapshot_files(dir: &Path, index: usize, snap: &FieldSnapshot) -> Result<()> {
    let mut w =
        std::io::BufWriter::new(std::fs::File::create(dir.join(format!("snap_{index}.ndjson")))?);
    io::write_field_ndjson(&mut w, snap)?;
    io::write_field_tensor(
        &dir.join(format!("snap_{index}.bin")),
        &dir.join(format!("snap_{index}.json")),
        snap,
    )?;
    Ok(())
}
