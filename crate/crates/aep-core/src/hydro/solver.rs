//! Conservative finite-difference solver for the cross-diffusion equation.
//!
//! Face fluxes use the flux-form rewrite
//! `d_s grad rho_hat = grad(d_s rho_hat) - d_s' rho_hat grad rho`,
//! with the d_s' factor discretized as the secant slope
//! `(d_s(rho_R) - d_s(rho_L)) / (rho_R - rho_L)` at each face. With that
//! choice the product-difference identity makes the angle-summed scheme
//! collapse to the plain 5-point discrete heat equation exactly when
//! `lambda = 0`.

use super::coeffs::{creation_rate, creation_rate_two_type, omega_vector};
use super::field::{AngularDensityField, EMPTY_CELL};
use crate::dynamics::AngleKind;
use crate::error::{Error, Result};
use crate::rng::substream_indexed;
use crate::selfdiff::DsTable;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeScheme {
    Euler,
    Heun,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdeConfig {
    pub l: usize,
    pub m: usize,
    pub dt: f64,
    pub lambda: f64,
    pub beta: f64,
    pub t_end: f64,
    pub kind: AngleKind,
    pub scheme: TimeScheme,
    /// Monte-Carlo sample count for the continuum creation rate.
    pub gamma_samples: usize,
    /// Enables the negativity clamp (mass corrections are logged either way).
    pub limiter: bool,
    /// Safety factor in the stability bound.
    pub cfl_safety: f64,
    pub seed: u64,
}

impl PdeConfig {
    pub fn new(l: usize, m: usize, lambda: f64, beta: f64) -> Self {
        PdeConfig {
            l,
            m,
            dt: 0.0, // callers set an explicit step; see cfl_bound
            lambda,
            beta,
            t_end: 0.0,
            kind: AngleKind::Continuum,
            scheme: TimeScheme::Euler,
            gamma_samples: 64,
            limiter: true,
            cfl_safety: 0.25,
            seed: 0,
        }
    }

    /// Largest admissible time step: `c h^2 / max(1, 2 lambda h)` (diffusion
    /// coefficients are bounded by one, drift speeds by 2 lambda).
    pub fn cfl_bound(&self) -> f64 {
        let h = 1.0 / self.l as f64;
        self.cfl_safety * h * h / (2.0 * self.lambda * h).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    /// Total mass added by the negativity clamp this step (cell-area units).
    pub mass_correction: f64,
    /// Most negative bin value seen before clamping.
    pub worst_negative: f64,
}

pub struct PdeSolver {
    cfg: PdeConfig,
    ds: DsTable,
    steps_taken: u64,
    pub cumulative_correction: f64,
}

impl PdeSolver {
    pub fn new(cfg: PdeConfig, ds: DsTable) -> Result<Self> {
        if cfg.kind == AngleKind::TwoType && cfg.m != 2 {
            return Err(Error::InvalidParameter(
                "two-type solves need exactly 2 bins".into(),
            ));
        }
        Ok(PdeSolver {
            cfg,
            ds,
            steps_taken: 0,
            cumulative_correction: 0.0,
        })
    }

    pub fn config(&self) -> &PdeConfig {
        &self.cfg
    }

    pub fn ds_table(&self) -> &DsTable {
        &self.ds
    }

    /// Time derivative of the field, as bins-per-unit-time. `stage`
    /// distinguishes the sub-evaluations of multi-stage schemes for the
    /// seeded creation-rate stream.
    fn derivative(&self, bins: &[f64], profile: &[f64], stage: u64) -> Result<Vec<f64>> {
        let l = self.cfg.l;
        let m = self.cfg.m;
        let cells = l * l;
        let h = 1.0 / l as f64;
        let inv_h2 = (l * l) as f64;
        let inv_h = l as f64;
        let lambda = self.cfg.lambda;

        let mut rho = vec![0.0; cells];
        let mut ds = vec![0.0; cells];
        let mut om = vec![(0.0, 0.0); cells];
        for c in 0..cells {
            let cb = &bins[c * m..(c + 1) * m];
            rho[c] = cb.iter().sum();
            ds[c] = self.ds.ds(rho[c]);
            if lambda != 0.0 {
                om[c] = omega_vector(cb);
            }
        }
        // trig factors 2 lambda_i(theta_k) / (2 lambda)
        let cos_k: Vec<f64> = (0..m)
            .map(|k| AngularDensityField::bin_center(m, k).cos())
            .collect();
        let sin_k: Vec<f64> = (0..m)
            .map(|k| AngularDensityField::bin_center(m, k).sin())
            .collect();

        let mut du = vec![0.0; cells * m];
        for axis in 0..2 {
            for cy in 0..l {
                for cx in 0..l {
                    let c = cx + l * cy;
                    let cr = if axis == 0 {
                        (cx + 1) % l + l * cy
                    } else {
                        cx + l * ((cy + 1) % l)
                    };
                    let (rl, rr) = (rho[c], rho[cr]);
                    let drho = rr - rl;
                    let (dsl, dsr) = (ds[c], ds[cr]);
                    let secant = if drho.abs() > 1e-12 {
                        (dsr - dsl) / drho
                    } else {
                        self.ds.ds_prime(0.5 * (rl + rr))
                    };
                    let (dfl, dfr) = (1.0 - dsl, 1.0 - dsr);
                    let (sfl, sfr) = (1.0 - rl - dsl, 1.0 - rr - dsr);
                    let om_face = if axis == 0 {
                        0.5 * (om[c].0 + om[cr].0)
                    } else {
                        0.5 * (om[c].1 + om[cr].1)
                    };
                    for k in 0..m {
                        let (bl, br) = (bins[c * m + k], bins[cr * m + k]);
                        let (pl, pr) = (profile[c * m + k], profile[cr * m + k]);
                        let d_face = 0.5 * (pl * dfl + pr * dfr);
                        let fdiff =
                            d_face * drho + (dsr * br - dsl * bl) - 0.5 * (bl + br) * secant * drho;
                        du[c * m + k] += fdiff * inv_h2;
                        du[cr * m + k] -= fdiff * inv_h2;
                        if lambda != 0.0 {
                            let s_face = 0.5 * (pl * sfl + pr * sfr);
                            let li = if axis == 0 { cos_k[k] } else { sin_k[k] };
                            let jd = 2.0 * lambda
                                * (s_face * om_face + li * 0.5 * (dsl * bl + dsr * br));
                            du[c * m + k] -= jd * inv_h;
                            du[cr * m + k] += jd * inv_h;
                        }
                    }
                }
            }
        }
        let _ = h;

        // alignment creation rate, pointwise per cell
        match self.cfg.kind {
            AngleKind::TwoType => {
                for c in 0..cells {
                    let (gp, gm) =
                        creation_rate_two_type(bins[c * m], bins[c * m + 1], self.cfg.beta);
                    du[c * m] += gp;
                    du[c * m + 1] += gm;
                }
            }
            AngleKind::Continuum => {
                let mut rng =
                    substream_indexed(self.cfg.seed, "pde-gamma", self.steps_taken * 4 + stage);
                for c in 0..cells {
                    let g = creation_rate(
                        &bins[c * m..(c + 1) * m],
                        &profile[c * m..(c + 1) * m],
                        self.cfg.beta,
                        self.cfg.gamma_samples,
                        &mut rng,
                    )?;
                    for k in 0..m {
                        du[c * m + k] += g[k];
                    }
                }
            }
        }
        Ok(du)
    }

    /// Advances the field by one step of `cfg.dt`. Refuses steps above the
    /// stability bound.
    pub fn step(&mut self, field: &mut AngularDensityField) -> Result<StepStats> {
        let dt = self.cfg.dt;
        let bound = self.cfg.cfl_bound();
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, bound });
        }
        if field.grid_side() != self.cfg.l || field.bin_count() != self.cfg.m {
            return Err(Error::GridMismatch("field does not match solver config".into()));
        }
        let f0 = self.derivative(field.bins_raw(), field.profile_raw(), 0)?;
        let new_bins: Vec<f64> = match self.cfg.scheme {
            TimeScheme::Euler => field
                .bins_raw()
                .iter()
                .zip(&f0)
                .map(|(&b, &d)| b + dt * d)
                .collect(),
            TimeScheme::Heun => {
                let y1: Vec<f64> = field
                    .bins_raw()
                    .iter()
                    .zip(&f0)
                    .map(|(&b, &d)| b + dt * d)
                    .collect();
                let p1 = refreshed_profile(&y1, field.profile_raw(), self.cfg.m);
                let f1 = self.derivative(&y1, &p1, 1)?;
                field
                    .bins_raw()
                    .iter()
                    .zip(f0.iter().zip(&f1))
                    .map(|(&b, (&d0, &d1))| b + 0.5 * dt * (d0 + d1))
                    .collect()
            }
        };
        let mut stats = StepStats::default();
        let area = 1.0 / (self.cfg.l * self.cfg.l) as f64;
        let bins = field.bins_mut();
        for (slot, v) in bins.iter_mut().zip(new_bins) {
            if v < 0.0 {
                stats.worst_negative = stats.worst_negative.min(v);
                if v < -1e-10 && !self.cfg.limiter {
                    return Err(Error::InvalidParameter(format!(
                        "negative bin mass {v} with the limiter disabled"
                    )));
                }
                stats.mass_correction += -v * area;
                *slot = 0.0;
            } else {
                *slot = v;
            }
        }
        field.refresh_profiles();
        field.set_time(field.time() + dt);
        self.steps_taken += 1;
        self.cumulative_correction += stats.mass_correction;
        Ok(stats)
    }

    /// Steps until the field's clock reaches `t_end` (the last step is
    /// shortened to land exactly).
    pub fn run_until(&mut self, field: &mut AngularDensityField, t_end: f64) -> Result<()> {
        while field.time() < t_end - 1e-12 {
            let remaining = t_end - field.time();
            if remaining < self.cfg.dt {
                let saved = self.cfg.dt;
                self.cfg.dt = remaining;
                let r = self.step(field);
                self.cfg.dt = saved;
                r?;
            } else {
                self.step(field)?;
            }
        }
        Ok(())
    }
}

/// Unit profiles for a bin vector, carrying `base` over empty cells.
pub(super) fn refreshed_profile(bins: &[f64], base: &[f64], m: usize) -> Vec<f64> {
    let mut prof = base.to_vec();
    for c in 0..bins.len() / m {
        let rho: f64 = bins[c * m..(c + 1) * m].iter().sum();
        if rho > EMPTY_CELL {
            for k in 0..m {
                prof[c * m + k] = bins[c * m + k] / rho;
            }
        }
    }
    prof
}
