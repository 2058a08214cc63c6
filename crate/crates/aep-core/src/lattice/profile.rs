//! Initial macroscopic profiles `zeta_hat(u, theta)` on the continuous torus.

use super::measure::TWO_PI;
use crate::error::{Error, Result};
use std::sync::Arc;

type SpaceAngleFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type SpaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// An initial density profile: nonnegative, with total angle mass strictly
/// below one everywhere. Either a continuum angle density or finitely many
/// angle atoms with space-dependent weights (e.g. the two-type model).
#[derive(Clone)]
pub enum InitialProfile {
    /// `zeta_hat(u1, u2, theta)`, a density in theta.
    Continuum {
        density: SpaceAngleFn,
        /// quadrature nodes used for the angle marginal and conditional CDF
        angle_nodes: usize,
    },
    /// Finitely many angle atoms; weight i is the mass at `angles[i]`.
    Atomic {
        angles: Vec<f64>,
        weights: Vec<SpaceFn>,
    },
}

impl InitialProfile {
    pub fn zero() -> Self {
        InitialProfile::Continuum {
            density: Arc::new(|_, _, _| 0.0),
            angle_nodes: 64,
        }
    }

    /// Space-independent uniform-angle profile with total density `alpha`.
    pub fn uniform(alpha: f64) -> Self {
        InitialProfile::Continuum {
            density: Arc::new(move |_, _, _| alpha / TWO_PI),
            angle_nodes: 256,
        }
    }

    pub fn continuum(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        InitialProfile::Continuum {
            density: Arc::new(f),
            angle_nodes: 2048,
        }
    }

    /// Two-type profile with angle atoms at 0 and pi.
    pub fn two_type(
        plus: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        minus: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        InitialProfile::Atomic {
            angles: vec![0.0, std::f64::consts::PI],
            weights: vec![Arc::new(plus), Arc::new(minus)],
        }
    }

    /// Total density `zeta(u)` at a macroscopic point.
    pub fn mass(&self, u1: f64, u2: f64) -> f64 {
        match self {
            InitialProfile::Continuum { density, angle_nodes } => {
                let q = *angle_nodes;
                let mut acc = 0.0;
                for j in 0..q {
                    acc += density(u1, u2, TWO_PI * j as f64 / q as f64);
                }
                acc * TWO_PI / q as f64
            }
            InitialProfile::Atomic { weights, .. } => weights.iter().map(|w| w(u1, u2)).sum(),
        }
    }

    /// Rejects profiles whose total density reaches one (assumption on the
    /// initial data); checked pointwise at the given macroscopic point.
    pub fn check_submass(&self, u1: f64, u2: f64) -> Result<f64> {
        let m = self.mass(u1, u2);
        if m >= 1.0 {
            return Err(Error::ProfileMassTooLarge(u1, u2));
        }
        if m < 0.0 {
            return Err(Error::InvalidMeasure(format!(
                "negative profile mass at ({u1}, {u2})"
            )));
        }
        Ok(m)
    }

    /// Inverse-CDF tables of the conditional angle law at a point, for the
    /// continuum case. Returns (nodes, cumulative masses up to each node).
    pub(crate) fn angle_cdf(&self, u1: f64, u2: f64) -> Option<(usize, Vec<f64>)> {
        match self {
            InitialProfile::Continuum { density, angle_nodes } => {
                let q = *angle_nodes;
                let mut cdf = Vec::with_capacity(q + 1);
                let mut acc = 0.0;
                cdf.push(0.0);
                for j in 0..q {
                    acc += density(u1, u2, TWO_PI * j as f64 / q as f64) * TWO_PI / q as f64;
                    cdf.push(acc);
                }
                Some((q, cdf))
            }
            InitialProfile::Atomic { .. } => None,
        }
    }
}
