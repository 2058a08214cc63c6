//! Tagged-particle self-diffusion of the symmetric exclusion process:
//! Monte-Carlo estimation of d_s(rho), an isotonic/monotone-cubic table, and
//! persistence for the PDE solver.
//!
//! Normalization: d_s := lim MSD_1 / (2 t) in microscopic time, equivalently
//! MSD_1 / (2 N^2 T) in macroscopic time, so that d_s(0) = 1. The raw
//! MSD_1 / t estimate (twice the normalized one) is exported alongside.

use crate::error::{Error, Result};
use crate::lattice::{TorusGeometry, ALL_DIRECTIONS};
use crate::rng::substream_indexed;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One SSEP run: all particles' displacements are averaged (each particle is
/// marginally a tagged particle, so this is an unbiased, variance-reduced
/// estimator of the tagged MSD). Returns per-coordinate mean squared
/// displacement and the mean occupied-neighbor fraction at the final time.
fn run_ssep(n: usize, rho: f64, t_end: f64, rng: &mut impl Rng) -> (f64, f64, f64) {
    let geom = TorusGeometry::new(n);
    let mut occ = vec![false; n * n];
    let mut sites: Vec<u32> = Vec::new();
    for s in 0..n * n {
        if rng.gen::<f64>() < rho {
            occ[s] = true;
            sites.push(s as u32);
        }
    }
    if sites.is_empty() {
        occ[0] = true;
        sites.push(0);
    }
    let k = sites.len();
    let mut disp = vec![(0i64, 0i64); k];
    let rate = k as f64 * 4.0 * (n * n) as f64;
    let mut t = 0.0;
    loop {
        t += -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln() / rate;
        if t > t_end {
            break;
        }
        let p = rng.gen_range(0..k);
        let s = sites[p] as usize;
        let d = ALL_DIRECTIONS[rng.gen_range(0..4)];
        let target = geom.neighbor(s, d);
        if !occ[target] {
            occ[s] = false;
            occ[target] = true;
            sites[p] = target as u32;
            let (dx, dy) = d.delta();
            disp[p].0 += dx;
            disp[p].1 += dy;
        }
    }
    let kf = k as f64;
    let sx: f64 = disp.iter().map(|d| (d.0 * d.0) as f64).sum();
    let sy: f64 = disp.iter().map(|d| (d.1 * d.1) as f64).sum();
    let neigh: f64 = sites
        .iter()
        .map(|&s| {
            ALL_DIRECTIONS
                .iter()
                .filter(|&&d| occ[geom.neighbor(s as usize, d)])
                .count() as f64
                / 4.0
        })
        .sum();
    (sx / kf, sy / kf, neigh / kf)
}

/// A Monte-Carlo estimate of d_s at one density.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DsEstimate {
    pub rho: f64,
    /// Normalized estimate, MSD_1 / (2 N^2 T).
    pub ds: f64,
    /// Jackknife standard error of `ds` over replicas.
    pub stderr: f64,
    /// The raw MSD_1 / (N^2 T) value (the paper's literal normalization).
    pub raw: f64,
    /// Per-coordinate normalized estimates (isotropy diagnostic).
    pub per_coord: (f64, f64),
    /// Mean occupied-neighbor fraction at the final time (equilibrium
    /// diagnostic; expectation rho).
    pub env_density: f64,
}

/// Estimates d_s(rho) on an N-torus over `replicas` independent runs of
/// macroscopic length `t_end`. rho = 1 returns exactly zero (the tagged
/// particle cannot move).
pub fn estimate_ds(
    rho: f64,
    n: usize,
    t_end: f64,
    replicas: usize,
    seed: u64,
) -> Result<DsEstimate> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("density {rho} outside [0,1]")));
    }
    if rho >= 1.0 {
        return Ok(DsEstimate {
            rho,
            ds: 0.0,
            stderr: 0.0,
            raw: 0.0,
            per_coord: (0.0, 0.0),
            env_density: 1.0,
        });
    }
    let norm = 2.0 * (n * n) as f64 * t_end;
    let runs: Vec<(f64, f64, f64)> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream_indexed(seed, "selfdiff", r);
            run_ssep(n, rho, t_end, &mut rng)
        })
        .collect();
    let per_rep: Vec<f64> = runs.iter().map(|(x, y, _)| (x + y) / 2.0 / norm).collect();
    let mean = per_rep.iter().sum::<f64>() / replicas as f64;
    // jackknife over replicas
    let stderr = if replicas > 1 {
        let jk: Vec<f64> = (0..replicas)
            .map(|i| {
                (per_rep.iter().sum::<f64>() - per_rep[i]) / (replicas - 1) as f64
            })
            .collect();
        let jm = jk.iter().sum::<f64>() / replicas as f64;
        ((replicas - 1) as f64 / replicas as f64
            * jk.iter().map(|v| (v - jm).powi(2)).sum::<f64>())
        .sqrt()
    } else {
        f64::NAN
    };
    let mx = runs.iter().map(|(x, _, _)| x).sum::<f64>() / replicas as f64;
    let my = runs.iter().map(|(_, y, _)| y).sum::<f64>() / replicas as f64;
    let env = runs.iter().map(|(_, _, e)| e).sum::<f64>() / replicas as f64;
    Ok(DsEstimate {
        rho,
        ds: mean,
        stderr,
        raw: 2.0 * mean,
        per_coord: (mx / norm, my / norm),
        env_density: env,
    })
}

/// Pool-adjacent-violators projection onto nonincreasing sequences
/// (weighted L2).
fn isotonic_nonincreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // blocks of (weighted mean, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() >= 2 {
            let b = blocks[blocks.len() - 1];
            let a = blocks[blocks.len() - 2];
            if a.0 >= b.0 {
                break;
            }
            blocks.pop();
            blocks.pop();
            let w = a.1 + b.1;
            blocks.push(((a.0 * a.1 + b.0 * b.1) / w, w, a.2 + b.2));
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (v, _, len) in blocks {
        out.extend(std::iter::repeat(v).take(len));
    }
    out
}

/// Fritsch–Carlson slopes for a monotone cubic Hermite interpolant.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // one-sided endpoint slopes with monotonicity clamp
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            s = 0.0;
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            s = 3.0 * d0;
        }
        s
    };
    m[0] = end(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

/// Tabulated self-diffusion coefficient with a monotone C^1 interpolant.
/// Endpoints d_s(0) = 1 and d_s(1) = 0 are pinned exactly; interior values
/// are projected onto nonincreasing sequences before interpolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DsTable {
    rho: Vec<f64>,
    ds: Vec<f64>,
    stderr: Vec<f64>,
    slopes: Vec<f64>,
    /// Raw MC estimates before projection/pinning, for transparency.
    raw_estimates: Vec<f64>,
}

impl DsTable {
    /// Builds a table from per-density estimates. The grid must include the
    /// endpoints 0 and 1, in increasing density order.
    pub fn from_estimates(estimates: &[DsEstimate]) -> Result<DsTable> {
        let n = estimates.len();
        if n < 3 || estimates[0].rho != 0.0 || estimates[n - 1].rho != 1.0 {
            return Err(Error::InvalidParameter(
                "density grid must run from 0 to 1 with interior points".into(),
            ));
        }
        if estimates.windows(2).any(|w| w[1].rho <= w[0].rho) {
            return Err(Error::InvalidParameter("density grid must increase".into()));
        }
        let rho: Vec<f64> = estimates.iter().map(|e| e.rho).collect();
        let raw: Vec<f64> = estimates.iter().map(|e| e.ds).collect();
        let mut vals = raw.clone();
        // pin endpoints exactly, then project the whole sequence
        vals[0] = 1.0;
        vals[n - 1] = 0.0;
        let weights: Vec<f64> = estimates
            .iter()
            .enumerate()
            .map(|(i, e)| {
                if i == 0 || i == n - 1 {
                    1e12 // effectively hard constraints in the projection
                } else {
                    1.0 / e.stderr.max(1e-6).powi(2)
                }
            })
            .collect();
        let mut ds = isotonic_nonincreasing(&vals, &weights);
        ds[0] = 1.0;
        ds[n - 1] = 0.0;
        for v in ds.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
        let slopes = pchip_slopes(&rho, &ds);
        Ok(DsTable {
            rho,
            ds,
            stderr: estimates.iter().map(|e| e.stderr).collect(),
            slopes,
            raw_estimates: raw,
        })
    }

    pub fn grid(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.rho, &self.ds, &self.stderr)
    }

    fn segment(&self, r: f64) -> usize {
        let n = self.rho.len();
        match self.rho.partition_point(|&x| x <= r) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Interpolated d_s(rho); clamps the argument into [0, 1].
    pub fn ds(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        let i = self.segment(r);
        let h = self.rho[i + 1] - self.rho[i];
        let t = (r - self.rho[i]) / h;
        let (y0, y1) = (self.ds[i], self.ds[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// Analytic derivative of the interpolant.
    pub fn ds_prime(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        let i = self.segment(r);
        let h = self.rho[i + 1] - self.rho[i];
        let t = (r - self.rho[i]) / h;
        let (y0, y1) = (self.ds[i], self.ds[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * y0 + (-6.0 * t2 + 6.0 * t) * y1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (3.0 * t2 - 2.0 * t) * m1
    }

    /// A smooth synthetic table for tests and defaults: d_s = (1-rho)/(1+rho),
    /// which satisfies the two-sided bound with C = 2 and the pinned
    /// endpoints. Not a measurement.
    pub fn synthetic(points: usize) -> DsTable {
        let rho: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let ds: Vec<f64> = rho.iter().map(|&r| (1.0 - r) / (1.0 + r)).collect();
        let slopes = pchip_slopes(&rho, &ds);
        DsTable {
            raw_estimates: ds.clone(),
            stderr: vec![0.0; points],
            rho,
            ds,
            slopes,
        }
    }

    /// Writes the table as CSV (rho, ds, stderr, raw) plus a JSON sidecar
    /// describing the normalization.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        let mut out = String::from("rho,ds,stderr,raw\n");
        for i in 0..self.rho.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.rho[i], self.ds[i], self.stderr[i], self.raw_estimates[i]
            ));
        }
        std::fs::write(csv_path, out)?;
        let sidecar = serde_json::json!({
            "normalization": "msd_per_coordinate / (2 N^2 T)",
            "raw_column": "unprojected normalized estimate",
            "slopes": self.slopes,
        });
        std::fs::write(
            csv_path.with_extension("json"),
            serde_json::to_string_pretty(&sidecar)?,
        )?;
        Ok(())
    }

    /// Reads a table written by [`save`](Self::save); the interpolant is
    /// rebuilt from the stored grid.
    pub fn load(csv_path: &Path) -> Result<DsTable> {
        let text = std::fs::read_to_string(csv_path)?;
        let mut rho = Vec::new();
        let mut ds = Vec::new();
        let mut stderr = Vec::new();
        let mut raw = Vec::new();
        for line in text.lines().skip(1) {
            let f: Vec<f64> = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("bad ds table line: {e}")))?;
            if f.len() != 4 {
                return Err(Error::InvalidParameter("bad ds table row".into()));
            }
            rho.push(f[0]);
            ds.push(f[1]);
            stderr.push(f[2]);
            raw.push(f[3]);
        }
        if rho.len() < 3 {
            return Err(Error::InvalidParameter("ds table too short".into()));
        }
        let slopes = pchip_slopes(&rho, &ds);
        Ok(DsTable {
            rho,
            ds,
            stderr,
            slopes,
            raw_estimates: raw,
        })
    }
}

/// Runs the full estimation sweep and assembles the table. The grid must
/// include 0 and 1 (those two are pinned without simulation).
pub fn build_ds_table(
    grid: &[f64],
    n: usize,
    t_end: f64,
    replicas: usize,
    seed: u64,
) -> Result<DsTable> {
    let estimates: Vec<DsEstimate> = grid
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            if rho == 0.0 {
                Ok(DsEstimate {
                    rho,
                    ds: 1.0,
                    stderr: 0.0,
                    raw: 2.0,
                    per_coord: (1.0, 1.0),
                    env_density: 0.0,
                })
            } else {
                estimate_ds(rho, n, t_end, replicas, seed.wrapping_add(i as u64 * 7919))
            }
        })
        .collect::<Result<_>>()?;
    DsTable::from_estimates(&estimates)
}
