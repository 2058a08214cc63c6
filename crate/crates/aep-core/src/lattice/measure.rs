//! Nonnegative angle measures with total mass at most one (the
//! grand-canonical parameters), and the dual-norm metric on them.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const TWO_PI: f64 = std::f64::consts::TAU;

fn wrap_angle(theta: f64) -> f64 {
    let t = theta % TWO_PI;
    if t < 0.0 {
        t + TWO_PI
    } else {
        t
    }
}

/// Circle distance between two angles.
fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TWO_PI;
    d.min(TWO_PI - d)
}

/// A nonnegative measure on [0, 2pi) with total mass <= 1: a list of atoms
/// plus an optional uniformly spread component (so that the uniform measure
/// `alpha * dtheta / 2pi` is representable exactly).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleMeasure {
    atoms: Vec<(f64, f64)>,
    uniform_mass: f64,
}

impl AngleMeasure {
    pub fn zero() -> Self {
        AngleMeasure {
            atoms: Vec::new(),
            uniform_mass: 0.0,
        }
    }

    pub fn dirac(theta: f64, weight: f64) -> Self {
        AngleMeasure {
            atoms: vec![(wrap_angle(theta), weight)],
            uniform_mass: 0.0,
        }
    }

    /// The uniform measure with total mass `alpha` (parameter of `mu*_alpha`).
    pub fn uniform(alpha: f64) -> Self {
        AngleMeasure {
            atoms: Vec::new(),
            uniform_mass: alpha,
        }
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Self {
        AngleMeasure {
            atoms: atoms.into_iter().map(|(t, w)| (wrap_angle(t), w)).collect(),
            uniform_mass: 0.0,
        }
    }

    /// Two-type measure with masses at angles 0 and pi.
    pub fn two_type(plus: f64, minus: f64) -> Self {
        AngleMeasure::from_atoms(vec![(0.0, plus), (std::f64::consts::PI, minus)])
    }

    pub fn validate(&self) -> Result<()> {
        if self.uniform_mass < 0.0 || self.atoms.iter().any(|&(_, w)| w < 0.0) {
            return Err(Error::InvalidMeasure("negative weight".into()));
        }
        let m = self.mass();
        if m > 1.0 + 1e-12 {
            return Err(Error::InvalidMeasure(format!("total mass {m} > 1")));
        }
        Ok(())
    }

    /// Total mass `alpha`.
    pub fn mass(&self) -> f64 {
        self.uniform_mass + self.atoms.iter().map(|&(_, w)| w).sum::<f64>()
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn uniform_mass(&self) -> f64 {
        self.uniform_mass
    }

    /// Integral of `g` against the measure. The uniform component is
    /// integrated by periodic trapezoid quadrature with `quad` nodes.
    pub fn integrate(&self, g: impl Fn(f64) -> f64, quad: usize) -> f64 {
        let mut total: f64 = self.atoms.iter().map(|&(t, w)| w * g(t)).sum();
        if self.uniform_mass > 0.0 {
            let mut acc = 0.0;
            for j in 0..quad {
                acc += g(TWO_PI * j as f64 / quad as f64);
            }
            total += self.uniform_mass * acc / quad as f64;
        }
        total
    }

    /// Bins the measure into `m` equal left-closed bins on [0, 2pi).
    pub fn histogram(&self, m: usize) -> Vec<f64> {
        let mut bins = vec![self.uniform_mass / m as f64; m];
        for &(t, w) in &self.atoms {
            let b = ((wrap_angle(t) / TWO_PI * m as f64) as usize).min(m - 1);
            bins[b] += w;
        }
        bins
    }

    /// The measure with all weights multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        AngleMeasure {
            atoms: self.atoms.iter().map(|&(t, w)| (t, w * factor)).collect(),
            uniform_mass: self.uniform_mass * factor,
        }
    }
}

/// Integral of `g` against the signed measure `a - b`.
fn pair_integral(a: &AngleMeasure, b: &AngleMeasure, g: impl Fn(f64) -> f64, quad: usize) -> f64 {
    a.integrate(&g, quad) - b.integrate(&g, quad)
}

/// Distance on angle measures: a convergent lower bound of
/// `sup { integral of g d(a - b) }` over the unit ball of C^1 functions
/// (`|g| <= 1`, `|g'| <= 1`), maximized over a finite generating family of
/// capped tent functions on an `m`-grid and low-order trigonometric
/// polynomials. Symmetric, nonnegative, satisfies the triangle inequality.
pub fn param_distance(a: &AngleMeasure, b: &AngleMeasure, m: usize) -> f64 {
    let quad = 4 * m.max(64);
    let mut best = 0.0f64;
    // tents: g(theta) = clamp(c - dist(theta, theta0), -1, 1); admissible
    // as the uniform limit of C^1 functions in the ball.
    let n_offsets = 2 * m;
    for j in 0..m {
        let theta0 = TWO_PI * j as f64 / m as f64;
        for k in 0..=n_offsets {
            let c = -1.0 + (2.0 + std::f64::consts::PI) * k as f64 / n_offsets as f64;
            let g = |t: f64| (c - circ_dist(t, theta0)).clamp(-1.0, 1.0);
            best = best.max(pair_integral(a, b, g, quad).abs());
        }
    }
    // low-order Fourier modes scaled into the ball
    for k in 1..=8u32 {
        let scale = 1.0 / (k as f64).max(1.0);
        let gc = |t: f64| scale * (k as f64 * t).cos();
        let gs = |t: f64| scale * (k as f64 * t).sin();
        best = best.max(pair_integral(a, b, gc, quad).abs());
        best = best.max(pair_integral(a, b, gs, quad).abs());
    }
    // the constant function 1 (mass difference)
    best = best.max(pair_integral(a, b, |_| 1.0, quad).abs());
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::Rng;
    use std::f64::consts::PI;

    #[test]
    fn mass_and_histogram_are_consistent() {
        let m = AngleMeasure::from_atoms(vec![(0.1, 0.2), (3.0, 0.3), (6.0, 0.1)]);
        assert!((m.mass() - 0.6).abs() < 1e-15);
        let h = m.histogram(8);
        assert!((h.iter().sum::<f64>() - 0.6).abs() < 1e-15);
        let u = AngleMeasure::uniform(0.4);
        assert!(u.histogram(5).iter().all(|&x| (x - 0.08).abs() < 1e-16));
    }

    #[test]
    fn distance_of_measure_to_itself_is_zero() {
        let m = AngleMeasure::from_atoms(vec![(0.3, 0.4), (2.0, 0.25)]);
        assert_eq!(param_distance(&m, &m, 64), 0.0);
    }

    #[test]
    fn dirac_pair_distance_matches_capped_transport_cost() {
        // brute-force oracle: dense maximization over admissible tents is
        // exactly min(circular distance, 2) for a pair of unit atoms
        for &(t1, t2) in &[(0.0, 0.5), (0.2, 3.0), (1.0, 1.0 + PI), (0.1, 6.0)] {
            let d = param_distance(
                &AngleMeasure::dirac(t1, 1.0),
                &AngleMeasure::dirac(t2, 1.0),
                512,
            );
            let expect = circ_dist(t1, t2).min(2.0);
            assert!(
                (d - expect).abs() < 0.02,
                "got {d}, expected {expect} for pair ({t1}, {t2})"
            );
        }
    }

    #[test]
    fn dirac_distance_vanishes_as_angles_merge() {
        // if theta_k -> theta then the distance of the Diracs goes to 0
        let theta = 1.0;
        let mut prev = f64::INFINITY;
        for k in 1..=4 {
            let thetak = theta + 0.5f64.powi(2 * k);
            let d = param_distance(
                &AngleMeasure::dirac(thetak, 1.0),
                &AngleMeasure::dirac(theta, 1.0),
                256,
            );
            assert!(d <= prev + 1e-12);
            prev = d;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn pseudometric_axioms_on_random_triples() {
        let mut rng = substream(11, "metric");
        for _ in 0..20 {
            let rand_measure = |rng: &mut rand_chacha::ChaCha12Rng| {
                let k = rng.gen_range(1..4);
                let mut atoms = Vec::new();
                let mut budget: f64 = rng.gen_range(0.0..1.0);
                for _ in 0..k {
                    let w = budget * rng.gen::<f64>();
                    budget -= w;
                    atoms.push((rng.gen::<f64>() * TWO_PI, w));
                }
                AngleMeasure::from_atoms(atoms)
            };
            let (a, b, c) = (rand_measure(&mut rng), rand_measure(&mut rng), rand_measure(&mut rng));
            let dab = param_distance(&a, &b, 64);
            let dba = param_distance(&b, &a, 64);
            let dac = param_distance(&a, &c, 64);
            let dcb = param_distance(&c, &b, 64);
            assert!(dab >= 0.0);
            assert!((dab - dba).abs() < 1e-12);
            assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
