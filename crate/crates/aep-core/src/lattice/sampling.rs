//! Sampling of product measures fitting a profile, grand-canonical measures,
//! and the empirical angular density of a box.

use super::config::Configuration;
use super::geometry::{BlockBox, TorusGeometry};
use super::measure::AngleMeasure;
use super::profile::InitialProfile;
use crate::error::Result;
use rand::Rng;

/// Samples the product measure fitting `profile` on the torus: sites are
/// independent, occupied with probability `zeta(x/N)`, with conditional angle
/// law `zeta_hat(x/N, .) / zeta(x/N)`. Deterministic given the RNG state.
pub fn sample_product_measure(
    profile: &InitialProfile,
    geom: TorusGeometry,
    rng: &mut impl Rng,
) -> Result<Configuration> {
    let n = geom.side();
    let mut config = Configuration::empty(geom);
    for site in geom.iter_sites() {
        let (x, y) = geom.coords(site);
        let (u1, u2) = (x as f64 / n as f64, y as f64 / n as f64);
        let zeta = profile.check_submass(u1, u2)?;
        if zeta == 0.0 || rng.gen::<f64>() >= zeta {
            continue;
        }
        let theta = match profile {
            InitialProfile::Continuum { .. } => {
                let (q, cdf) = profile.angle_cdf(u1, u2).expect("continuum profile");
                sample_from_cdf(&cdf, q, zeta, rng)
            }
            InitialProfile::Atomic { angles, weights } => {
                let ws: Vec<f64> = weights.iter().map(|w| w(u1, u2)).collect();
                angles[sample_categorical(&ws, rng)]
            }
        };
        config.occupy(site, theta);
    }
    Ok(config)
}

/// Linear-interpolation inverse CDF on a regular grid of `q` angle nodes.
fn sample_from_cdf(cdf: &[f64], q: usize, total: f64, rng: &mut impl Rng) -> f64 {
    use super::measure::TWO_PI;
    let target = rng.gen::<f64>() * total;
    // first node with cumulative mass >= target
    let idx = cdf.partition_point(|&c| c < target).max(1).min(q);
    let (lo, hi) = (cdf[idx - 1], cdf[idx]);
    let frac = if hi > lo { (target - lo) / (hi - lo) } else { 0.0 };
    (idx as f64 - 1.0 + frac) * TWO_PI / q as f64
}

fn sample_categorical(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            return i;
        }
        target -= w;
    }
    weights.len() - 1
}

/// Samples an angle from a grand-canonical parameter, conditioned on
/// occupancy (i.e. from `alpha_hat / alpha`).
pub fn sample_angle_from_measure(alpha_hat: &AngleMeasure, rng: &mut impl Rng) -> f64 {
    use super::measure::TWO_PI;
    let total = alpha_hat.mass();
    let mut target = rng.gen::<f64>() * total;
    if target < alpha_hat.uniform_mass() {
        return rng.gen::<f64>() * TWO_PI;
    }
    target -= alpha_hat.uniform_mass();
    for &(t, w) in alpha_hat.atoms() {
        if target < w {
            return t;
        }
        target -= w;
    }
    alpha_hat
        .atoms()
        .last()
        .map(|&(t, _)| t)
        .unwrap_or_else(|| rng.gen::<f64>() * TWO_PI)
}

/// Samples the grand-canonical measure `mu_{alpha_hat}` on a torus of the
/// given side: i.i.d. sites, occupancy probability `alpha`, angle law
/// `alpha_hat / alpha`.
pub fn sample_grand_canonical(
    alpha_hat: &AngleMeasure,
    box_side: usize,
    rng: &mut impl Rng,
) -> Result<Configuration> {
    alpha_hat.validate()?;
    let alpha = alpha_hat.mass();
    let geom = TorusGeometry::new(box_side);
    let mut config = Configuration::empty(geom);
    for site in geom.iter_sites() {
        if rng.gen::<f64>() < alpha {
            let theta = sample_angle_from_measure(alpha_hat, rng);
            config.occupy(site, theta);
        }
    }
    Ok(config)
}

/// The empirical angular density of the box: an atomic measure with one atom
/// per particle and mass `(# particles in the box) / |B_l|`.
pub fn empirical_angular_density(config: &Configuration, block: &BlockBox) -> AngleMeasure {
    let weight = 1.0 / block.len() as f64;
    let atoms: Vec<(f64, f64)> = block
        .sites(config.geometry())
        .into_iter()
        .filter(|&s| config.is_occupied(s))
        .map(|s| (config.angle_at(s), weight))
        .collect();
    AngleMeasure::from_atoms(atoms)
}
