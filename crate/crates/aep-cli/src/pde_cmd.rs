//! The `pde` subcommand: solve the hydrodynamic equation from the configured
//! profile, export slices in the tensor-plus-sidecar format, and report mass
//! conservation (and the heat-kernel error when a reference is requested).

use crate::config::RunConfig;
use aep_core::dynamics::AngleKind;
use aep_core::hydro::{AngularDensityField, PdeSolver, TwoTypeField, TwoTypeSolver};
use aep_core::io;
use aep_core::selfdiff::DsTable;
use aep_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdeReport {
    pub initial_mass: f64,
    pub final_mass: f64,
    /// |final - initial| mass drift divided by the horizon.
    pub mass_drift_per_unit_time: f64,
    /// Mass added by the negativity clamp over the whole solve.
    pub cumulative_correction: f64,
    /// Max-norm error at the final time against the heat-kernel decay
    /// (only for `reference = "heat"` runs).
    pub heat_linf: Option<f64>,
}

fn heat_reference_error(cfg: &RunConfig, field: &AngularDensityField) -> Result<f64> {
    if cfg.profile.preset != "cosine-density" || cfg.model.lambda != 0.0 {
        return Err(Error::InvalidParameter(
            "the heat reference needs the cosine-density preset at lambda = 0".into(),
        ));
    }
    let l = cfg.pde.cells;
    let t = cfg.model.t_end;
    let (alpha, amp) = (cfg.profile.alpha, cfg.profile.amp);
    let decay = (-4.0 * std::f64::consts::PI.powi(2) * t).exp();
    let mut worst = 0.0f64;
    for cy in 0..l {
        for cx in 0..l {
            let u1 = (cx as f64 + 0.5) / l as f64;
            let expect = alpha * (1.0 + amp * decay * (std::f64::consts::TAU * u1).cos());
            worst = worst.max((field.rho(cx + l * cy) - expect).abs());
        }
    }
    Ok(worst)
}

pub fn run_pde(cfg: &RunConfig, config_text: &str) -> Result<PdeReport> {
    let out = &cfg.paths.output;
    std::fs::create_dir_all(out)?;
    let l = cfg.pde.cells;
    let profile = cfg.build_profile()?;
    let ds = match &cfg.paths.ds_table {
        Some(p) => DsTable::load(p)?,
        None => DsTable::synthetic(33),
    };
    let pde_cfg = cfg.pde_config(l)?;
    let schedule = cfg.schedule();
    let mut series = Vec::new();
    let (initial_mass, final_mass, correction, heat_linf) = match cfg.angle_kind()? {
        AngleKind::TwoType => {
            let mut field = TwoTypeField::from_profile(&profile, l)?;
            let mut solver = TwoTypeSolver::new(pde_cfg, ds);
            let initial = field.total_mass();
            for (i, &t) in schedule.iter().enumerate() {
                solver.run_until(&mut field, t)?;
                let mut data = Vec::with_capacity(l * l * 2);
                for c in 0..l * l {
                    data.push(field.plus[c]);
                    data.push(field.minus[c]);
                }
                io::write_tensor(
                    &out.join(format!("slice_{i}.bin")),
                    &out.join(format!("slice_{i}.json")),
                    &data,
                    &[l, l, 2],
                    json!({ "time": t, "layout": "rho_plus, rho_minus" }),
                )?;
                series.push(vec![t, field.total_mass(), solver.cumulative_correction]);
            }
            (initial, field.total_mass(), solver.cumulative_correction, None)
        }
        AngleKind::Continuum => {
            let m = cfg.observation.bins;
            let mut field = AngularDensityField::from_profile(&profile, l, m)?;
            let mut solver = PdeSolver::new(pde_cfg, ds)?;
            let initial = field.total_mass();
            for (i, &t) in schedule.iter().enumerate() {
                solver.run_until(&mut field, t)?;
                io::write_tensor(
                    &out.join(format!("slice_{i}.bin")),
                    &out.join(format!("slice_{i}.json")),
                    field.bins_raw(),
                    &[l, l, m],
                    json!({ "time": t, "layout": "angle-bin masses" }),
                )?;
                series.push(vec![t, field.total_mass(), solver.cumulative_correction]);
            }
            let linf = if cfg.pde.reference == "heat" {
                Some(heat_reference_error(cfg, &field)?)
            } else {
                None
            };
            (initial, field.total_mass(), solver.cumulative_correction, linf)
        }
    };
    let mut w = std::io::BufWriter::new(std::fs::File::create(out.join("series.csv"))?);
    io::write_series_csv(&mut w, &["time", "mass", "cumulative_correction"], &series)?;
    let report = PdeReport {
        initial_mass,
        final_mass,
        mass_drift_per_unit_time: if cfg.model.t_end > 0.0 {
            (final_mass - initial_mass).abs() / cfg.model.t_end
        } else {
            0.0
        },
        cumulative_correction: correction,
        heat_linf,
    };
    std::fs::write(out.join("pde_report.json"), serde_json::to_string_pretty(&report)?)?;
    crate::manifest::write_manifest(
        out,
        "pde",
        config_text,
        cfg.model.seed,
        json!({ "cells": l, "schedule": schedule }),
    )?;
    Ok(report)
}
