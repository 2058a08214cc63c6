//! Dedicated solver for the two-type (up/down) system: a pair of coupled
//! scalar densities `(rho_plus, rho_minus)` with drift only along the first
//! axis. Written independently of the general M-bin solver so the two can be
//! cross-checked against each other.

use super::coeffs::creation_rate_two_type;
use super::field::EMPTY_CELL;
use super::solver::{PdeConfig, StepStats, TimeScheme};
use crate::error::{Error, Result};
use crate::lattice::InitialProfile;
use crate::selfdiff::DsTable;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoTypeField {
    l: usize,
    t: f64,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Up-fraction per cell, carried across empty cells.
    frac_plus: Vec<f64>,
}

impl TwoTypeField {
    pub fn new_uniform(l: usize, plus: f64, minus: f64) -> Self {
        let rho = plus + minus;
        let frac = if rho > 0.0 { plus / rho } else { 0.5 };
        TwoTypeField {
            l,
            t: 0.0,
            plus: vec![plus; l * l],
            minus: vec![minus; l * l],
            frac_plus: vec![frac; l * l],
        }
    }

    pub fn from_profile(profile: &InitialProfile, l: usize) -> Result<Self> {
        let InitialProfile::Atomic { angles, weights } = profile else {
            return Err(Error::InvalidParameter(
                "two-type fields need an atomic profile".into(),
            ));
        };
        if angles.len() != 2 {
            return Err(Error::InvalidParameter(
                "two-type fields need exactly two atoms".into(),
            ));
        }
        let mut f = TwoTypeField::new_uniform(l, 0.0, 0.0);
        for cy in 0..l {
            for cx in 0..l {
                let (u1, u2) = ((cx as f64 + 0.5) / l as f64, (cy as f64 + 0.5) / l as f64);
                profile.check_submass(u1, u2)?;
                f.plus[cx + l * cy] = weights[0](u1, u2);
                f.minus[cx + l * cy] = weights[1](u1, u2);
            }
        }
        f.refresh_fractions();
        Ok(f)
    }

    pub fn grid_side(&self) -> usize {
        self.l
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn rho(&self, c: usize) -> f64 {
        self.plus[c] + self.minus[c]
    }

    pub fn total_mass(&self) -> f64 {
        (self.plus.iter().sum::<f64>() + self.minus.iter().sum::<f64>())
            / (self.l * self.l) as f64
    }

    pub fn refresh_fractions(&mut self) {
        for c in 0..self.l * self.l {
            let rho = self.plus[c] + self.minus[c];
            if rho > EMPTY_CELL {
                self.frac_plus[c] = self.plus[c] / rho;
            }
        }
    }
}

pub struct TwoTypeSolver {
    cfg: PdeConfig,
    ds: DsTable,
    pub cumulative_correction: f64,
}

impl TwoTypeSolver {
    pub fn new(cfg: PdeConfig, ds: DsTable) -> Self {
        TwoTypeSolver {
            cfg,
            ds,
            cumulative_correction: 0.0,
        }
    }

    pub fn config(&self) -> &PdeConfig {
        &self.cfg
    }

    fn derivative(
        &self,
        plus: &[f64],
        minus: &[f64],
        frac: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let l = self.cfg.l;
        let cells = l * l;
        let inv_h2 = (l * l) as f64;
        let inv_h = l as f64;
        let lambda = self.cfg.lambda;

        let mut rho = vec![0.0; cells];
        let mut ds = vec![0.0; cells];
        for c in 0..cells {
            rho[c] = plus[c] + minus[c];
            ds[c] = self.ds.ds(rho[c]);
        }
        let mut dp = vec![0.0; cells];
        let mut dm = vec![0.0; cells];
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
                    for sign in 0..2 {
                        let (fl, fr, vl, vr) = if sign == 0 {
                            (frac[c], frac[cr], plus[c], plus[cr])
                        } else {
                            (1.0 - frac[c], 1.0 - frac[cr], minus[c], minus[cr])
                        };
                        let d_face = 0.5 * (fl * dfl + fr * dfr);
                        let fdiff =
                            d_face * drho + (dsr * vr - dsl * vl) - 0.5 * (vl + vr) * secant * drho;
                        let out = if sign == 0 { &mut dp } else { &mut dm };
                        out[c] += fdiff * inv_h2;
                        out[cr] -= fdiff * inv_h2;
                        // drift acts along the first axis only; the up atom
                        // moves with +lambda, the down atom with -lambda
                        if lambda != 0.0 && axis == 0 {
                            let (sfl, sfr) = (1.0 - rl - dsl, 1.0 - rr - dsr);
                            let s_face = 0.5 * (fl * sfl + fr * sfr);
                            let m_face = 0.5
                                * (plus[c] - minus[c] + plus[cr] - minus[cr]);
                            let atom = if sign == 0 { 1.0 } else { -1.0 };
                            let jd = 2.0 * lambda
                                * (s_face * m_face + atom * 0.5 * (dsl * vl + dsr * vr));
                            out[c] -= jd * inv_h;
                            out[cr] += jd * inv_h;
                        }
                    }
                }
            }
        }
        for c in 0..cells {
            let (gp, gm) = creation_rate_two_type(plus[c], minus[c], self.cfg.beta);
            dp[c] += gp;
            dm[c] += gm;
        }
        (dp, dm)
    }

    pub fn step(&mut self, field: &mut TwoTypeField) -> Result<StepStats> {
        let dt = self.cfg.dt;
        let bound = self.cfg.cfl_bound();
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, bound });
        }
        if field.l != self.cfg.l {
            return Err(Error::GridMismatch("field does not match solver config".into()));
        }
        let (dp0, dm0) = self.derivative(&field.plus, &field.minus, &field.frac_plus);
        let (newp, newm): (Vec<f64>, Vec<f64>) = match self.cfg.scheme {
            TimeScheme::Euler => (
                field.plus.iter().zip(&dp0).map(|(&v, &d)| v + dt * d).collect(),
                field.minus.iter().zip(&dm0).map(|(&v, &d)| v + dt * d).collect(),
            ),
            TimeScheme::Heun => {
                let p1: Vec<f64> =
                    field.plus.iter().zip(&dp0).map(|(&v, &d)| v + dt * d).collect();
                let m1: Vec<f64> =
                    field.minus.iter().zip(&dm0).map(|(&v, &d)| v + dt * d).collect();
                let mut frac1 = field.frac_plus.clone();
                for c in 0..p1.len() {
                    let rho = p1[c] + m1[c];
                    if rho > EMPTY_CELL {
                        frac1[c] = p1[c] / rho;
                    }
                }
                let (dp1, dm1) = self.derivative(&p1, &m1, &frac1);
                (
                    field
                        .plus
                        .iter()
                        .zip(dp0.iter().zip(&dp1))
                        .map(|(&v, (&a, &b))| v + 0.5 * dt * (a + b))
                        .collect(),
                    field
                        .minus
                        .iter()
                        .zip(dm0.iter().zip(&dm1))
                        .map(|(&v, (&a, &b))| v + 0.5 * dt * (a + b))
                        .collect(),
                )
            }
        };
        let mut stats = StepStats::default();
        let area = 1.0 / (self.cfg.l * self.cfg.l) as f64;
        let mut clamp = |slot: &mut f64, v: f64| -> Result<()> {
            if v < 0.0 {
                stats.worst_negative = stats.worst_negative.min(v);
                if v < -1e-10 && !self.cfg.limiter {
                    return Err(Error::InvalidParameter(format!(
                        "negative density {v} with the limiter disabled"
                    )));
                }
                stats.mass_correction += -v * area;
                *slot = 0.0;
            } else {
                *slot = v;
            }
            Ok(())
        };
        for (slot, v) in field.plus.iter_mut().zip(newp) {
            clamp(slot, v)?;
        }
        for (slot, v) in field.minus.iter_mut().zip(newm) {
            clamp(slot, v)?;
        }
        field.refresh_fractions();
        field.t += dt;
        self.cumulative_correction += stats.mass_correction;
        Ok(stats)
    }

    pub fn run_until(&mut self, field: &mut TwoTypeField, t_end: f64) -> Result<()> {
        while field.t < t_end - 1e-12 {
            let remaining = t_end - field.t;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::AngleKind;
    use crate::hydro::field::AngularDensityField;
    use crate::hydro::solver::PdeSolver;
    use crate::lattice::TWO_PI;

    fn config(l: usize, lambda: f64, beta: f64) -> PdeConfig {
        let mut cfg = PdeConfig::new(l, 2, lambda, beta);
        cfg.kind = AngleKind::TwoType;
        cfg.dt = 0.8 * cfg.cfl_bound();
        cfg
    }

    #[test]
    fn matches_the_general_bin_solver() {
        // the M = 2 instance of the general solver and this dedicated
        // implementation discretize the same equation; they must agree
        // step by step
        let l = 8;
        let cfg = config(l, 1.2, 0.7);
        let profile = InitialProfile::two_type(
            |u1, u2| 0.2 + 0.1 * (TWO_PI * u1).cos() + 0.05 * (TWO_PI * u2).sin(),
            |u1, _| 0.25 - 0.1 * (TWO_PI * u1).sin(),
        );
        let mut dedicated = TwoTypeField::from_profile(&profile, l).unwrap();
        let mut general = AngularDensityField::from_profile(&profile, l, 2).unwrap();
        let mut s1 = TwoTypeSolver::new(cfg.clone(), DsTable::synthetic(31));
        let mut s2 = PdeSolver::new(cfg, DsTable::synthetic(31)).unwrap();
        for step in 0..25 {
            s1.step(&mut dedicated).unwrap();
            s2.step(&mut general).unwrap();
            for c in 0..l * l {
                let b = general.cell_bins(c);
                assert!(
                    (dedicated.plus[c] - b[0]).abs() < 1e-10
                        && (dedicated.minus[c] - b[1]).abs() < 1e-10,
                    "step {step} cell {c}: ({}, {}) vs ({}, {})",
                    dedicated.plus[c],
                    dedicated.minus[c],
                    b[0],
                    b[1]
                );
            }
        }
    }

    /// Reference 1D solver on a fine grid: the same two-type system for
    /// profiles constant in the second coordinate, written from scratch with
    /// plain centered differences for the diffusion and face averages for
    /// the drift.
    fn reference_1d(
        plus0: &[f64],
        minus0: &[f64],
        lambda: f64,
        beta: f64,
        ds: &DsTable,
        dt: f64,
        t_end: f64,
    ) -> (Vec<f64>, Vec<f64>) {
        let l = plus0.len();
        let inv_h = l as f64;
        let mut p = plus0.to_vec();
        let mut q = minus0.to_vec();
        let mut t = 0.0;
        while t < t_end - 1e-12 {
            let step = dt.min(t_end - t);
            let mut flux_p = vec![0.0; l]; // flux through the face (i, i+1)
            let mut flux_q = vec![0.0; l];
            for i in 0..l {
                let j = (i + 1) % l;
                let (rl, rr) = (p[i] + q[i], p[j] + q[j]);
                let (dsl, dsr) = (ds.ds(rl), ds.ds(rr));
                let drho = (rr - rl) * inv_h;
                for (f, vl, vr, atom) in [
                    (&mut flux_p, p[i], p[j], 1.0),
                    (&mut flux_q, q[i], q[j], -1.0),
                ] {
                    let dcoef = 0.5 * (vl / rl.max(1e-300) * (1.0 - dsl)
                        + vr / rr.max(1e-300) * (1.0 - dsr));
                    let dv = (dsr * vr - dsl * vl) * inv_h;
                    let dsp = if (rr - rl).abs() > 1e-12 {
                        (dsr - dsl) / (rr - rl)
                    } else {
                        ds.ds_prime(0.5 * (rl + rr))
                    };
                    let diffusive = dcoef * drho + dv - 0.5 * (vl + vr) * dsp * drho;
                    let scoef = 0.5 * (vl / rl.max(1e-300) * (1.0 - rl - dsl)
                        + vr / rr.max(1e-300) * (1.0 - rr - dsr));
                    let m_face = 0.5 * (p[i] - q[i] + p[j] - q[j]);
                    let drift =
                        2.0 * lambda * (scoef * m_face + atom * 0.5 * (dsl * vl + dsr * vr));
                    f[i] = -diffusive + drift;
                }
            }
            let mut np = vec![0.0; l];
            let mut nq = vec![0.0; l];
            for i in 0..l {
                let prev = (i + l - 1) % l;
                let (gp, gm) = creation_rate_two_type(p[i], q[i], beta);
                np[i] = p[i] + step * (-(flux_p[i] - flux_p[prev]) * inv_h + gp);
                nq[i] = q[i] + step * (-(flux_q[i] - flux_q[prev]) * inv_h + gm);
            }
            p = np;
            q = nq;
            t += step;
        }
        (p, q)
    }

    #[test]
    fn refined_grid_oracle_with_drift() {
        // lambda > 0, beta = 0, data constant in u2: the 2D solve must match
        // an independently written fine-grid 1D solve of the same system
        let l = 64;
        let fine = 512;
        let lambda = 1.0;
        let t_end = 0.02;
        let ds = DsTable::synthetic(41);
        let plus_init = |u1: f64| 0.25 + 0.1 * (TWO_PI * u1).cos();
        let profile = InitialProfile::two_type(move |u1, _| plus_init(u1), |_, _| 0.0);
        let mut field = TwoTypeField::from_profile(&profile, l).unwrap();
        let mut solver = TwoTypeSolver::new(config(l, lambda, 0.0), ds.clone());
        solver.run_until(&mut field, t_end).unwrap();

        let p0: Vec<f64> = (0..fine)
            .map(|i| plus_init((i as f64 + 0.5) / fine as f64))
            .collect();
        let q0 = vec![0.0; fine];
        let h_fine = 1.0 / fine as f64;
        let (pf, qf) = reference_1d(&p0, &q0, lambda, 0.0, &ds, 0.2 * h_fine * h_fine, t_end);

        // compare on the coarse cells (fine-grid averages over each block)
        let block = fine / l;
        let mut l1 = 0.0;
        for cx in 0..l {
            let avg_p: f64 =
                pf[cx * block..(cx + 1) * block].iter().sum::<f64>() / block as f64;
            let avg_q: f64 =
                qf[cx * block..(cx + 1) * block].iter().sum::<f64>() / block as f64;
            l1 += (field.plus[cx] - avg_p).abs() + (field.minus[cx] - avg_q).abs();
        }
        l1 /= l as f64;
        assert!(l1 <= 1e-3, "L1 distance {l1}");
        // the solution must stay constant in u2
        for cy in 1..l {
            for cx in 0..l {
                assert!((field.plus[cx + l * cy] - field.plus[cx]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn drift_moves_up_particles_right_and_down_particles_left() {
        let l = 32;
        let profile = InitialProfile::two_type(
            |u1, _| 0.3 * (-(50.0 * (u1 - 0.5).powi(2))).exp(),
            |u1, _| 0.3 * (-(50.0 * (u1 - 0.5).powi(2))).exp(),
        );
        let mut field = TwoTypeField::from_profile(&profile, l).unwrap();
        let mut solver = TwoTypeSolver::new(config(l, 2.0, 0.0), DsTable::synthetic(31));
        let com = |v: &[f64]| -> f64 {
            let mut num = 0.0;
            let mut den = 0.0;
            for cx in 0..l {
                let u1 = (cx as f64 + 0.5) / l as f64;
                num += u1 * v[cx];
                den += v[cx];
            }
            num / den
        };
        let (cp0, cm0) = (com(&field.plus[..l]), com(&field.minus[..l]));
        solver.run_until(&mut field, 0.01).unwrap();
        let (cp1, cm1) = (com(&field.plus[..l]), com(&field.minus[..l]));
        assert!(cp1 > cp0 + 1e-4, "up center of mass: {cp0} -> {cp1}");
        assert!(cm1 < cm0 - 1e-4, "down center of mass: {cm0} -> {cm1}");
    }
}
