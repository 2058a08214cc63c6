//! Canonical states and exchangeability-exact canonical sampling.

use super::config::Configuration;
use super::geometry::{BlockBox, TorusGeometry};
use super::measure::AngleMeasure;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;

/// A canonical state: the particle count and angle multiset of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalState {
    pub angles: Vec<f64>,
}

impl CanonicalState {
    pub fn new(angles: Vec<f64>) -> Self {
        CanonicalState { angles }
    }

    pub fn count(&self) -> usize {
        self.angles.len()
    }

    /// The associated grand-canonical parameter: the empirical atom measure
    /// with per-atom weight `1 / |B_l|`.
    pub fn parameter(&self, box_len: usize) -> AngleMeasure {
        let w = 1.0 / box_len as f64;
        AngleMeasure::from_atoms(self.angles.iter().map(|&t| (t, w)).collect())
    }
}

/// Reads the canonical state of a configuration on a box.
pub fn canonical_state_of(config: &Configuration, block: &BlockBox) -> CanonicalState {
    let angles = block
        .sites(config.geometry())
        .into_iter()
        .filter(|&s| config.is_occupied(s))
        .map(|s| config.angle_at(s))
        .collect();
    CanonicalState::new(angles)
}

/// Samples the canonical measure on a box of the given side: since the
/// reference grand-canonical measure is exchangeable, conditioning on the
/// canonical state places the given angle multiset uniformly at random on
/// distinct sites.
pub fn sample_canonical(
    state: &CanonicalState,
    box_side: usize,
    rng: &mut impl Rng,
) -> Result<Configuration> {
    let geom = TorusGeometry::new(box_side);
    if state.count() > geom.sites() {
        return Err(Error::BoxOverflow {
            count: state.count(),
            capacity: geom.sites(),
        });
    }
    let mut sites: Vec<usize> = geom.iter_sites().collect();
    sites.shuffle(rng);
    let mut config = Configuration::empty(geom);
    for (&site, &theta) in sites.iter().zip(state.angles.iter()) {
        config.occupy(site, theta);
    }
    Ok(config)
}
