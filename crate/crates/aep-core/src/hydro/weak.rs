//! Weak (distributional) formulation of the limit equation, evaluated on a
//! stored trajectory of density fields. Used to certify that solver output
//! actually satisfies the equation in the integrated-by-parts sense, with
//! test functions supplied by the caller.

use super::coeffs::{creation_rate, omega_vector};
use super::field::AngularDensityField;
use crate::error::{Error, Result};
use crate::rng::substream_indexed;
use crate::selfdiff::DsTable;

/// A smooth test function `H(t, u, theta)` on `[0, T] x T^2 x S^1`, with the
/// derivatives the weak form needs: time, first and second space derivatives.
pub trait TestFunction {
    fn h(&self, t: f64, u: (f64, f64), theta: f64) -> f64;
    fn dt(&self, t: f64, u: (f64, f64), theta: f64) -> f64;
    /// First derivative in space coordinate `i` (0 or 1).
    fn du(&self, i: usize, t: f64, u: (f64, f64), theta: f64) -> f64;
    /// Second (unmixed) derivative in space coordinate `i`.
    fn d2u(&self, i: usize, t: f64, u: (f64, f64), theta: f64) -> f64;
}

/// Parameters of the equation being tested.
#[derive(Debug, Clone, Copy)]
pub struct WeakFormParams {
    pub lambda: f64,
    pub beta: f64,
    /// Monte-Carlo samples for the alignment term when `beta > 0`.
    pub gamma_samples: usize,
    pub seed: u64,
}

/// Pairing `<pi_t, H(t)>` of a field with a test function at the field's
/// own time.
pub fn pairing(field: &AngularDensityField, tf: &dyn TestFunction) -> f64 {
    let l = field.grid_side();
    let m = field.bin_count();
    let t = field.time();
    let area = 1.0 / (l * l) as f64;
    let mut acc = 0.0;
    for cy in 0..l {
        for cx in 0..l {
            let u = ((cx as f64 + 0.5) / l as f64, (cy as f64 + 0.5) / l as f64);
            let c = cx + l * cy;
            for (k, &b) in field.cell_bins(c).iter().enumerate() {
                acc += tf.h(t, u, AngularDensityField::bin_center(m, k)) * b;
            }
        }
    }
    acc * area
}

/// Spatial part of the weak form at one time slice: the integrated-by-parts
/// transport terms plus the alignment term, paired with the test function.
fn bulk_term(
    field: &AngularDensityField,
    tf: &dyn TestFunction,
    ds_table: &DsTable,
    params: &WeakFormParams,
    slice_index: u64,
) -> Result<f64> {
    let l = field.grid_side();
    let m = field.bin_count();
    let t = field.time();
    let area = 1.0 / (l * l) as f64;
    let half_inv_h = 0.5 * l as f64;
    let cells = l * l;

    let mut rho = vec![0.0; cells];
    for c in 0..cells {
        rho[c] = field.rho(c);
    }
    let mut rng = substream_indexed(params.seed, "weak-gamma", slice_index);
    let mut acc = 0.0;
    for cy in 0..l {
        for cx in 0..l {
            let c = cx + l * cy;
            let u = ((cx as f64 + 0.5) / l as f64, (cy as f64 + 0.5) / l as f64);
            let r = rho[c];
            let ds = ds_table.ds(r);
            let dsp = ds_table.ds_prime(r);
            let grad_rho = [
                (rho[field.cell_index(cx + 1, cy)] - rho[field.cell_index(cx + l - 1, cy)])
                    * half_inv_h,
                (rho[field.cell_index(cx, cy + 1)] - rho[field.cell_index(cx, cy + l - 1)])
                    * half_inv_h,
            ];
            let bins = field.cell_bins(c);
            let om = omega_vector(bins);
            let omega = [om.0, om.1];
            let prof = field.unit_profile(c);
            let gamma = if params.beta == 0.0 {
                (0..m).map(|k| r / m as f64 - bins[k]).collect::<Vec<f64>>()
            } else {
                creation_rate(bins, prof, params.beta, params.gamma_samples, &mut rng)?
            };
            for (k, &b) in bins.iter().enumerate() {
                let theta = AngularDensityField::bin_center(m, k);
                // bin-integrated coefficients: d = (rho_hat/rho)(1 - d_s)
                // integrates to prof * (1 - d_s), etc.
                let d_k = prof[k] * (1.0 - ds);
                let s_k = prof[k] * (1.0 - r - ds);
                let lam = [theta.cos(), theta.sin()];
                for i in 0..2 {
                    acc += -tf.du(i, t, u, theta) * (d_k - dsp * b) * grad_rho[i]
                        + tf.d2u(i, t, u, theta) * ds * b
                        + tf.du(i, t, u, theta)
                            * 2.0
                            * params.lambda
                            * (s_k * omega[i] + lam[i] * ds * b);
                }
                acc += tf.h(t, u, theta) * gamma[k]
                    + tf.dt(t, u, theta) * b;
            }
        }
    }
    Ok(acc * area)
}

/// Weak-form residual of a trajectory:
/// `<pi_T, H(T)> - <pi_0, H(0)> - integral of (<pi_t, dH/dt> + bulk terms)`,
/// with the time integral taken by the trapezoid rule over the stored
/// slices. Vanishes (up to discretization error) when the trajectory solves
/// the equation.
pub fn weak_form_residual(
    slices: &[AngularDensityField],
    tf: &dyn TestFunction,
    ds_table: &DsTable,
    params: &WeakFormParams,
) -> Result<f64> {
    if slices.len() < 2 {
        return Err(Error::InvalidParameter(
            "a trajectory needs at least two time slices".into(),
        ));
    }
    for s in &slices[1..] {
        slices[0].check_compatible(s)?;
        }
    let lhs = pairing(&slices[slices.len() - 1], tf) - pairing(&slices[0], tf);
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (j, s) in slices.iter().enumerate() {
        let b = bulk_term(s, tf, ds_table, params, j as u64)?;
        if let Some((tp, bp)) = prev {
            let dt = s.time() - tp;
            if dt <= 0.0 {
                return Err(Error::InvalidParameter(
                    "time slices must be strictly increasing".into(),
                ));
            }
            integral += 0.5 * dt * (bp + b);
        }
        prev = Some((s.time(), b));
    }
    Ok(lhs - integral)
}
