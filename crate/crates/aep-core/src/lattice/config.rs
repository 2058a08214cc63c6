//! Lattice configurations: an occupancy bit and an angle per site, plus a
//! particle index for O(1) uniform particle selection.

use super::geometry::{TorusGeometry, ALL_DIRECTIONS};
use crate::error::{Error, Result};

const NO_PARTICLE: u32 = u32::MAX;

/// A configuration on the torus. Empty sites carry the sentinel angle 0;
/// observables must mask by the occupancy before reading an angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    geom: TorusGeometry,
    occ: Vec<bool>,
    angle: Vec<f64>,
    /// Occupied sites, in insertion order; entry i is the site of particle i.
    particles: Vec<u32>,
    /// site -> particle index, NO_PARTICLE if empty.
    slot: Vec<u32>,
}

impl Configuration {
    pub fn empty(geom: TorusGeometry) -> Self {
        let s = geom.sites();
        Configuration {
            geom,
            occ: vec![false; s],
            angle: vec![0.0; s],
            particles: Vec::new(),
            slot: vec![NO_PARTICLE; s],
        }
    }

    pub fn geometry(&self) -> &TorusGeometry {
        &self.geom
    }

    pub fn particle_count(&self) -> usize {
        self.particles.len()
    }

    pub fn is_occupied(&self, site: usize) -> bool {
        self.occ[site]
    }

    /// Angle at a site (the sentinel 0 on empty sites).
    pub fn angle_at(&self, site: usize) -> f64 {
        self.angle[site]
    }

    /// `eta_x * omega(theta_x)` for an angle weight `omega`.
    pub fn weighted_occupancy(&self, site: usize, omega: impl Fn(f64) -> f64) -> f64 {
        if self.occ[site] {
            omega(self.angle[site])
        } else {
            0.0
        }
    }

    /// Occupied sites; index into this slice is the particle identity.
    pub fn particle_sites(&self) -> &[u32] {
        &self.particles
    }

    pub fn particle_index_of(&self, site: usize) -> Option<usize> {
        if self.occ[site] {
            Some(self.slot[site] as usize)
        } else {
            None
        }
    }

    /// Places a particle on an empty site.
    pub fn occupy(&mut self, site: usize, theta: f64) {
        debug_assert!(!self.occ[site], "occupy on a filled site");
        self.occ[site] = true;
        self.angle[site] = theta;
        self.slot[site] = self.particles.len() as u32;
        self.particles.push(site as u32);
    }

    /// Exchanges the contents of two sites (the paper's eta^{x,y} move).
    /// Particle identities travel with the particles.
    pub fn swap(&mut self, x: usize, y: usize) {
        if x == y || self.occ[x] == self.occ[y] {
            if self.occ[x] && self.occ[y] && x != y {
                self.angle.swap(x, y);
                let (px, py) = (self.slot[x], self.slot[y]);
                self.particles[px as usize] = y as u32;
                self.particles[py as usize] = x as u32;
                self.slot.swap(x, y);
            }
            return;
        }
        let (from, to) = if self.occ[x] { (x, y) } else { (y, x) };
        self.occ[from] = false;
        self.occ[to] = true;
        self.angle[to] = self.angle[from];
        self.angle[from] = 0.0;
        let p = self.slot[from];
        self.slot[from] = NO_PARTICLE;
        self.slot[to] = p;
        self.particles[p as usize] = to as u32;
    }

    /// Pure version of [`swap`](Self::swap).
    pub fn swapped(&self, x: usize, y: usize) -> Self {
        let mut c = self.clone();
        c.swap(x, y);
        c
    }

    /// Updates the angle of an occupied site (the paper's eta^{x,theta} move).
    pub fn set_angle(&mut self, site: usize, theta: f64) -> Result<()> {
        if !self.occ[site] {
            return Err(Error::EmptySite(site));
        }
        self.angle[site] = theta;
        Ok(())
    }

    /// Pure version of [`set_angle`](Self::set_angle).
    pub fn with_angle(&self, site: usize, theta: f64) -> Result<Self> {
        let mut c = self.clone();
        c.set_angle(site, theta)?;
        Ok(c)
    }

    /// The translated configuration `tau_v eta`: site y of the result holds
    /// the contents of site y + v.
    pub fn translate(&self, v: (i64, i64)) -> Self {
        let mut out = Configuration::empty(self.geom);
        for y in self.geom.iter_sites() {
            let src = self.geom.translate_site(y, v);
            if self.occ[src] {
                out.occupy(y, self.angle[src]);
            }
        }
        out
    }

    /// Number of occupied nearest neighbors of a site.
    pub fn occupied_neighbors(&self, site: usize) -> usize {
        ALL_DIRECTIONS
            .iter()
            .filter(|&&d| self.occ[self.geom.neighbor(site, d)])
            .count()
    }

    /// Internal consistency of bitmap, angles and particle index.
    pub fn check_invariants(&self) -> bool {
        for s in self.geom.iter_sites() {
            if !self.occ[s] && self.angle[s] != 0.0 {
                return false;
            }
            match (self.occ[s], self.slot[s]) {
                (false, p) if p != NO_PARTICLE => return false,
                (true, p) if self.particles.get(p as usize) != Some(&(s as u32)) => return false,
                _ => {}
            }
        }
        true
    }
}
