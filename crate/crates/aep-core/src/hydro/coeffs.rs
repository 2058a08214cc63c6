//! Coefficients of the hydrodynamic equation: cross-diffusion and
//! conductivity per bin, the local asymmetry direction, and the alignment
//! creation rate.

use super::field::AngularDensityField;
use crate::dynamics::bessel_i0;
use crate::error::{Error, Result};
use crate::lattice::TWO_PI;
use crate::selfdiff::DsTable;
use rand::Rng;

/// Per-bin diffusion coefficient `d = (rho_hat / rho)(1 - d_s(rho))`; the
/// empty-cell limit is zero since d_s(0) = 1 is pinned.
pub fn coeff_d(profile: &[f64], rho: f64, ds: &DsTable) -> Vec<f64> {
    let factor = 1.0 - ds.ds(rho);
    profile.iter().map(|&p| p * factor).collect()
}

/// Per-bin conductivity `s = (rho_hat / rho)(1 - rho - d_s(rho))`; vanishes
/// at both rho = 0 and rho = 1.
pub fn coeff_s(profile: &[f64], rho: f64, ds: &DsTable) -> Vec<f64> {
    let factor = 1.0 - rho - ds.ds(rho);
    profile.iter().map(|&p| p * factor).collect()
}

/// Mean asymmetry direction: first circular moment of the bin masses
/// (midpoint rule at bin centers).
pub fn omega_vector(bins: &[f64]) -> (f64, f64) {
    let m = bins.len();
    let mut v = (0.0, 0.0);
    for (k, &b) in bins.iter().enumerate() {
        let theta = AngularDensityField::bin_center(m, k);
        v.0 += b * theta.cos();
        v.1 += b * theta.sin();
    }
    v
}

/// Bin masses of the von Mises density with concentration `kappa` and
/// location `phi` (per-bin midpoint quadrature, renormalized to sum to one).
fn von_mises_bin_masses(m: usize, kappa: f64, phi: f64, nodes: usize, out: &mut [f64]) {
    let norm = TWO_PI * bessel_i0(kappa);
    let width = TWO_PI / m as f64;
    let mut total = 0.0;
    for k in 0..m {
        let left = AngularDensityField::bin_center(m, k) - width / 2.0;
        let mut acc = 0.0;
        for j in 0..nodes {
            let theta = left + width * (j as f64 + 0.5) / nodes as f64;
            acc += (kappa * (theta - phi).cos()).exp();
        }
        out[k] = acc * width / (nodes as f64 * norm);
        total += out[k];
    }
    // the continuum density integrates to one; project the quadrature onto
    // that constraint so the creation rate sums to zero exactly
    for v in out.iter_mut() {
        *v /= total;
    }
}

/// Continuum-angle creation rate `Gamma_k = rho E[c-bin-mass_k] - rho_hat_k`,
/// with the neighbor expectation estimated by seeded Monte Carlo over the
/// 4 i.i.d. neighbors. Sums to zero exactly. `beta = 0` falls back to the
/// closed form `rho/M - rho_hat_k`.
pub fn creation_rate(
    bins: &[f64],
    profile: &[f64],
    beta: f64,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let m = bins.len();
    let rho: f64 = bins.iter().sum();
    if beta == 0.0 {
        return Ok((0..m).map(|k| rho / m as f64 - bins[k]).collect());
    }
    if samples < 1 {
        return Err(Error::InvalidParameter("creation rate needs samples >= 1".into()));
    }
    let mut mean = vec![0.0; m];
    let mut masses = vec![0.0; m];
    // cumulative angle law of one occupied neighbor
    let mut cdf = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &p in profile {
        acc += p;
        cdf.push(acc);
    }
    for _ in 0..samples {
        let (mut vx, mut vy) = (0.0, 0.0);
        for _ in 0..4 {
            if rng.gen::<f64>() < rho {
                let u = rng.gen::<f64>() * acc;
                let k = cdf.partition_point(|&c| c < u).min(m - 1);
                let theta = AngularDensityField::bin_center(m, k);
                vx += theta.cos();
                vy += theta.sin();
            }
        }
        let r = vx.hypot(vy);
        let phi = if r > 0.0 { vy.atan2(vx) } else { 0.0 };
        von_mises_bin_masses(m, beta * r, phi, 8, &mut masses);
        for k in 0..m {
            mean[k] += masses[k];
        }
    }
    Ok((0..m)
        .map(|k| rho * mean[k] / samples as f64 - bins[k])
        .collect())
}

/// Exact two-type creation rate by enumeration of the neighbor states:
/// each of the 4 neighbors is empty / up / down, and the flip probability is
/// the atom-renormalized alignment density. Returns `(Gamma_plus,
/// Gamma_minus)`; their sum is zero exactly.
pub fn creation_rate_two_type(plus: f64, minus: f64, beta: f64) -> (f64, f64) {
    let rho = plus + minus;
    let mut expect_up = 0.0;
    if rho > 0.0 {
        // multinomial over (up, down, empty) neighbor counts
        for n_up in 0..=4u32 {
            for n_down in 0..=4 - n_up {
                let n_empty = 4 - n_up - n_down;
                let multi = factorial(4)
                    / (factorial(n_up) * factorial(n_down) * factorial(n_empty));
                let w = multi as f64
                    * plus.powi(n_up as i32)
                    * minus.powi(n_down as i32)
                    * (1.0 - rho).powi(n_empty as i32);
                let s = n_up as f64 - n_down as f64;
                expect_up += w * (beta * s).exp() / ((beta * s).exp() + (-beta * s).exp());
            }
        }
    } else {
        expect_up = 0.5;
    }
    let gamma_plus = rho * expect_up - plus;
    let gamma_minus = rho * (1.0 - expect_up) - minus;
    (gamma_plus, gamma_minus)
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}
