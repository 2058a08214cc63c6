//! The hydrodynamic comparison experiment: for each lattice side N, run
//! replicas of the particle system, coarse-grain onto a shared grid, and
//! measure the time-averaged L1 distance D(N) to the PDE solution started
//! from the same initial profile. The limit theorem predicts D(N) -> 0.

use crate::config::RunConfig;
use crate::runner::{merge_series, run_replicas};
use aep_core::dynamics::AngleKind;
use aep_core::exactcheck::log_log_slope;
use aep_core::hydro::{AngularDensityField, PdeSolver, TwoTypeField, TwoTypeSolver};
use aep_core::io;
use aep_core::observables::FieldSnapshot;
use aep_core::selfdiff::DsTable;
use aep_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub sizes: Vec<usize>,
    /// Time-averaged L1 distance to the PDE per lattice side.
    pub d: Vec<f64>,
    /// Fitted slope of log D against log N.
    pub slope: f64,
    /// Distance on the initial slice only (pure sampling noise).
    pub noise_floor: Vec<f64>,
    /// Per size: distance at each scheduled time.
    pub per_time: Vec<Vec<f64>>,
    /// Per size, per tracked p: replica- and time-averaged full-cluster
    /// fraction.
    pub cluster: Vec<Vec<f64>>,
    pub schedule: Vec<f64>,
}

/// One coarse slice: per shared-grid cell, the component vector compared in
/// L1 (rho+/rho- for two-type runs, the bin histogram for continuum runs).
type Slice = Vec<Vec<f64>>;

fn block_mean(values: &[f64], l: usize, g: usize) -> Vec<f64> {
    let f = l / g;
    let mut out = vec![0.0; g * g];
    for y in 0..l {
        for x in 0..l {
            out[(x / f) + g * (y / f)] += values[x + l * y];
        }
    }
    let norm = (f * f) as f64;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// Solves the PDE on `pde_cells` cells and returns one slice per scheduled
/// time, block-averaged onto the shared grid.
fn pde_slices(cfg: &RunConfig, ds: &DsTable) -> Result<Vec<Slice>> {
    let l = cfg.compare.pde_cells;
    let g = cfg.compare.grid;
    let profile = cfg.build_profile()?;
    let pde_cfg = cfg.pde_config(l)?;
    let mut out = Vec::new();
    match cfg.angle_kind()? {
        AngleKind::TwoType => {
            let mut field = TwoTypeField::from_profile(&profile, l)?;
            let mut solver = TwoTypeSolver::new(pde_cfg, ds.clone());
            for &t in &cfg.schedule() {
                solver.run_until(&mut field, t)?;
                let plus = block_mean(&field.plus, l, g);
                let minus = block_mean(&field.minus, l, g);
                out.push(
                    plus.iter()
                        .zip(&minus)
                        .map(|(&p, &m)| vec![p, m])
                        .collect(),
                );
            }
        }
        AngleKind::Continuum => {
            let m = cfg.observation.bins;
            let mut field = AngularDensityField::from_profile(&profile, l, m)?;
            let mut solver = PdeSolver::new(pde_cfg, ds.clone())?;
            for &t in &cfg.schedule() {
                solver.run_until(&mut field, t)?;
                // project each bin separately
                let per_bin: Vec<Vec<f64>> = (0..m)
                    .map(|k| {
                        let vals: Vec<f64> =
                            (0..l * l).map(|c| field.bins_raw()[c * m + k]).collect();
                        block_mean(&vals, l, g)
                    })
                    .collect();
                out.push(
                    (0..g * g)
                        .map(|c| (0..m).map(|k| per_bin[k][c]).collect())
                        .collect(),
                );
            }
        }
    }
    Ok(out)
}

/// Extracts the compared component vector from an empirical snapshot cell.
fn empirical_components(snap: &FieldSnapshot, cell: usize, kind: AngleKind) -> Vec<f64> {
    match kind {
        AngleKind::TwoType => {
            let rho = snap.mass(cell);
            let mx = snap.magnetization(cell).0;
            vec![(rho + mx) / 2.0, (rho - mx) / 2.0]
        }
        AngleKind::Continuum => snap.histogram(cell),
    }
}

/// Mean L1 distance between an empirical replica-averaged slice and a PDE
/// slice on the shared grid.
fn slice_distance(emp: &Slice, pde: &Slice) -> f64 {
    let cells = emp.len();
    let mut acc = 0.0;
    for (e, p) in emp.iter().zip(pde) {
        acc += e.iter().zip(p).map(|(a, b)| (a - b).abs()).sum::<f64>();
    }
    acc / cells as f64
}

/// Runs the full comparison described by the config and writes the report
/// into `paths.output` (unless `config_text` is empty, for in-process use).
pub fn run_compare(cfg: &RunConfig, config_text: &str) -> Result<CompareReport> {
    let g = cfg.compare.grid;
    let kind = cfg.angle_kind()?;
    let ds = match &cfg.paths.ds_table {
        Some(p) => DsTable::load(p)?,
        None => DsTable::synthetic(33),
    };
    let pde = pde_slices(cfg, &ds)?;
    let schedule = cfg.schedule();
    let mut report = CompareReport {
        sizes: cfg.compare.sizes.clone(),
        d: Vec::new(),
        slope: 0.0,
        noise_floor: Vec::new(),
        per_time: Vec::new(),
        cluster: Vec::new(),
        schedule: schedule.clone(),
    };
    for &n in &cfg.compare.sizes {
        if n % g != 0 {
            return Err(Error::GridMismatch(format!(
                "lattice side {n} not divisible by shared grid {g}"
            )));
        }
        let replicas = run_replicas(cfg, n, g)?;
        // replica-averaged empirical slices
        let mut distances = Vec::new();
        for (i, _) in schedule.iter().enumerate() {
            let mut avg: Slice = vec![Vec::new(); g * g];
            for rep in &replicas {
                for (c, acc) in avg.iter_mut().enumerate() {
                    let comp = empirical_components(&rep.snapshots[i], c, kind);
                    if acc.is_empty() {
                        *acc = comp;
                    } else {
                        for (a, v) in acc.iter_mut().zip(&comp) {
                            *a += v;
                        }
                    }
                }
            }
            let k = replicas.len() as f64;
            for acc in &mut avg {
                acc.iter_mut().for_each(|v| *v /= k);
            }
            distances.push(slice_distance(&avg, &pde[i]));
        }
        report.noise_floor.push(distances[0]);
        report
            .d
            .push(distances.iter().sum::<f64>() / distances.len() as f64);
        // time- and replica-averaged full-cluster fractions
        let merged = merge_series(&replicas);
        let base = 4; // columns before the cluster block
        let cluster: Vec<f64> = (0..cfg.observation.cluster_p.len())
            .map(|j| {
                merged.iter().map(|row| row[base + j]).sum::<f64>() / merged.len() as f64
            })
            .collect();
        report.cluster.push(cluster);
        report.per_time.push(distances);
    }
    report.slope = log_log_slope(
        &report
            .sizes
            .iter()
            .zip(&report.d)
            .map(|(&n, &d)| (n as f64, d))
            .collect::<Vec<_>>(),
    );
    if !config_text.is_empty() {
        let out = &cfg.paths.output;
        std::fs::create_dir_all(out)?;
        std::fs::write(
            out.join("compare_report.json"),
            serde_json::to_string_pretty(&report)?,
        )?;
        let mut rows = Vec::new();
        for (i, &n) in report.sizes.iter().enumerate() {
            for (j, &t) in schedule.iter().enumerate() {
                rows.push(vec![n as f64, t, report.per_time[i][j]]);
            }
        }
        let mut w =
            std::io::BufWriter::new(std::fs::File::create(out.join("compare_series.csv"))?);
        io::write_series_csv(&mut w, &["n", "time", "l1_distance"], &rows)?;
        crate::manifest::write_manifest(
            out,
            "compare",
            config_text,
            cfg.model.seed,
            json!({ "sizes": report.sizes, "slope": report.slope }),
        )?;
    }
    Ok(report)
}
