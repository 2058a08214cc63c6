//! The discretized angular density: an L x L periodic grid of M-bin angle
//! histograms, each bin carrying mass (density integrated over the bin).

use crate::error::{Error, Result};
use crate::lattice::{InitialProfile, TWO_PI};
use crate::observables::FieldSnapshot;
use serde::{Deserialize, Serialize};

/// Threshold below which a cell is treated as empty and its angle profile is
/// carried over from the previous step instead of being recomputed as a 0/0.
pub const EMPTY_CELL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularDensityField {
    l: usize,
    m: usize,
    t: f64,
    /// Cell-major: bins[c * m + k] is the mass of angle bin k in cell c.
    bins: Vec<f64>,
    /// Unit angle profile per cell (sums to one), carried across empty cells.
    profile: Vec<f64>,
}

impl AngularDensityField {
    /// Bin k is centered at `2 pi k / M` (so M = 2 puts the centers at the
    /// two-type atoms 0 and pi).
    pub fn bin_center(m: usize, k: usize) -> f64 {
        TWO_PI * k as f64 / m as f64
    }

    pub fn new_uniform(l: usize, m: usize, rho: f64) -> Self {
        AngularDensityField {
            l,
            m,
            t: 0.0,
            bins: vec![rho / m as f64; l * l * m],
            profile: vec![1.0 / m as f64; l * l * m],
        }
    }

    /// Discretizes an initial profile at cell centers; continuum angle
    /// densities are integrated over each bin by midpoint quadrature.
    pub fn from_profile(profile: &InitialProfile, l: usize, m: usize) -> Result<Self> {
        let mut field = AngularDensityField::new_uniform(l, m, 0.0);
        let sub = 16;
        for cy in 0..l {
            for cx in 0..l {
                let (u1, u2) = ((cx as f64 + 0.5) / l as f64, (cy as f64 + 0.5) / l as f64);
                profile.check_submass(u1, u2)?;
                let c = cx + l * cy;
                match profile {
                    InitialProfile::Continuum { density, .. } => {
                        for k in 0..m {
                            let mut mass = 0.0;
                            for j in 0..sub {
                                let theta = Self::bin_center(m, k) - TWO_PI / (2.0 * m as f64)
                                    + TWO_PI * (j as f64 + 0.5) / (sub * m) as f64;
                                mass += density(u1, u2, theta);
                            }
                            field.bins[c * m + k] = mass * TWO_PI / (sub * m) as f64;
                        }
                    }
                    InitialProfile::Atomic { angles, weights } => {
                        for (a, w) in angles.iter().zip(weights) {
                            let k = Self::angle_bin(m, *a);
                            field.bins[c * m + k] += w(u1, u2);
                        }
                    }
                }
            }
        }
        field.refresh_profiles();
        Ok(field)
    }

    /// Aggregates an empirical snapshot into a field on the snapshot's own
    /// coarse grid (bin counts to bin masses).
    pub fn from_snapshot(snap: &FieldSnapshot) -> Self {
        let l = snap.grid_side();
        let m = snap.bins;
        let mut field = AngularDensityField::new_uniform(l, m, 0.0);
        for c in 0..l * l {
            let hist = snap.histogram(c);
            field.bins[c * m..(c + 1) * m].copy_from_slice(&hist);
        }
        field.t = snap.time;
        field.refresh_profiles();
        field
    }

    /// Index of the bin containing an angle (bins are centered at
    /// `2 pi k / M` and have width `2 pi / M`).
    pub fn angle_bin(m: usize, theta: f64) -> usize {
        let w = TWO_PI / m as f64;
        let t = theta.rem_euclid(TWO_PI);
        ((t + w / 2.0) / w) as usize % m
    }

    pub fn grid_side(&self) -> usize {
        self.l
    }

    pub fn bin_count(&self) -> usize {
        self.m
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    pub fn cells(&self) -> usize {
        self.l * self.l
    }

    pub fn cell_index(&self, x: usize, y: usize) -> usize {
        (x % self.l) + self.l * (y % self.l)
    }

    pub fn cell_bins(&self, c: usize) -> &[f64] {
        &self.bins[c * self.m..(c + 1) * self.m]
    }

    pub fn bins_mut(&mut self) -> &mut [f64] {
        &mut self.bins
    }

    pub fn bins_raw(&self) -> &[f64] {
        &self.bins
    }

    pub fn profile_raw(&self) -> &[f64] {
        &self.profile
    }

    /// Local density `rho(u) = sum_bins`.
    pub fn rho(&self, c: usize) -> f64 {
        self.cell_bins(c).iter().sum()
    }

    /// Total mass `integral of rho du` (cell area times cell sum).
    pub fn total_mass(&self) -> f64 {
        self.bins.iter().sum::<f64>() / (self.l * self.l) as f64
    }

    /// Unit angle profile of a cell (bins / rho, or the carried profile for
    /// empty cells).
    pub fn unit_profile(&self, c: usize) -> &[f64] {
        &self.profile[c * self.m..(c + 1) * self.m]
    }

    /// Recomputes carried unit profiles for all non-empty cells. Called after
    /// every solver step.
    pub fn refresh_profiles(&mut self) {
        for c in 0..self.cells() {
            let rho: f64 = self.bins[c * self.m..(c + 1) * self.m].iter().sum();
            if rho > EMPTY_CELL {
                for k in 0..self.m {
                    self.profile[c * self.m + k] = self.bins[c * self.m + k] / rho;
                }
            }
        }
    }

    pub fn check_compatible(&self, other: &AngularDensityField) -> Result<()> {
        if self.l != other.l || self.m != other.m {
            return Err(Error::GridMismatch(format!(
                "{}x{} bins {} vs {}x{} bins {}",
                self.l, self.l, self.m, other.l, other.l, other.m
            )));
        }
        Ok(())
    }
}
