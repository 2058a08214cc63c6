//! Measurement layer: coarse-grained empirical fields, block averages,
//! full-cluster statistics and displacement summaries.

use crate::error::{Error, Result};
use crate::lattice::{Configuration, TWO_PI};
use serde::{Deserialize, Serialize};

/// One coarse cell: integer counts, so the derived quantities are exactly
/// consistent (summing histogram bins reproduces the cell count bitwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub count: u32,
    pub bin_counts: Vec<u32>,
    /// Sum of (cos theta, sin theta) over the particles of the cell.
    pub spin_sum: (f64, f64),
}

/// A coarse-grained snapshot of the empirical field on an L x L grid of
/// disjoint square blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub time: f64,
    pub n: usize,
    pub block_side: usize,
    pub bins: usize,
    /// Row-major L x L cells, L = N / block_side.
    pub cells: Vec<CellStats>,
}

impl FieldSnapshot {
    pub fn grid_side(&self) -> usize {
        self.n / self.block_side
    }

    /// Cell mass in [0, 1]: particle count over block area.
    pub fn mass(&self, cell: usize) -> f64 {
        let area = (self.block_side * self.block_side) as f64;
        self.cells[cell].count as f64 / area
    }

    /// Angle histogram of a cell in mass units; sums to `mass(cell)`.
    pub fn histogram(&self, cell: usize) -> Vec<f64> {
        let area = (self.block_side * self.block_side) as f64;
        self.cells[cell]
            .bin_counts
            .iter()
            .map(|&c| c as f64 / area)
            .collect()
    }

    /// Block-averaged magnetization vector of a cell; norm bounded by mass.
    pub fn magnetization(&self, cell: usize) -> (f64, f64) {
        let area = (self.block_side * self.block_side) as f64;
        let (sx, sy) = self.cells[cell].spin_sum;
        (sx / area, sy / area)
    }

    /// Total particle count across cells.
    pub fn total_count(&self) -> u64 {
        self.cells.iter().map(|c| c.count as u64).sum()
    }
}

/// Coarse-grains a configuration over disjoint `block_side` x `block_side`
/// cells with an `bins`-bin angle histogram. `block_side` must divide N so
/// the cells tile the torus exactly.
pub fn field_snapshot(
    config: &Configuration,
    time: f64,
    block_side: usize,
    bins: usize,
) -> Result<FieldSnapshot> {
    let n = config.geometry().side();
    if block_side == 0 || n % block_side != 0 {
        return Err(Error::GridMismatch(format!(
            "block side {block_side} does not tile a torus of side {n}"
        )));
    }
    let l = n / block_side;
    let mut cells = vec![
        CellStats {
            count: 0,
            bin_counts: vec![0; bins],
            spin_sum: (0.0, 0.0),
        };
        l * l
    ];
    for &site in config.particle_sites() {
        let (x, y) = config.geometry().coords(site as usize);
        let cell = (x / block_side) + l * (y / block_side);
        let theta = config.angle_at(site as usize);
        let b = ((theta / TWO_PI * bins as f64) as usize).min(bins - 1);
        let c = &mut cells[cell];
        c.count += 1;
        c.bin_counts[b] += 1;
        c.spin_sum.0 += theta.cos();
        c.spin_sum.1 += theta.sin();
    }
    Ok(FieldSnapshot {
        time,
        n,
        block_side,
        bins,
        cells,
    })
}

/// Circular sliding-window box sums: out[x] = number of particles in
/// `B_l(x)`, the box of side 2l+1 centered at x. Separable prefix sums,
/// O(N^2).
fn sliding_box_counts(config: &Configuration, l: usize) -> Vec<u32> {
    let geom = config.geometry();
    let n = geom.side();
    let mut row_sums = vec![0u32; n * n];
    for y in 0..n {
        let mut acc = 0u32;
        for dx in 0..(2 * l + 1) {
            acc += config.is_occupied(geom.index(dx as i64 - l as i64, y as i64)) as u32;
        }
        for x in 0..n {
            row_sums[x + n * y] = acc;
            let leave = geom.index(x as i64 - l as i64, y as i64);
            let enter = geom.index(x as i64 + l as i64 + 1, y as i64);
            acc -= config.is_occupied(leave) as u32;
            acc += config.is_occupied(enter) as u32;
        }
    }
    let mut out = vec![0u32; n * n];
    for x in 0..n {
        let mut acc = 0u32;
        for dy in 0..(2 * l + 1) {
            acc += row_sums[x + n * ((dy + n - l % n) % n)];
        }
        for y in 0..n {
            out[x + n * y] = acc;
            acc -= row_sums[x + n * ((y + n - l % n) % n)];
            acc += row_sums[x + n * ((y + l + 1) % n)];
        }
    }
    out
}

/// The mollified density field `x -> tau_x rho_{l}`: sliding block averages
/// over boxes of side 2l+1, one value per site.
pub fn mollified_density(config: &Configuration, l: usize) -> Result<Vec<f64>> {
    let n = config.geometry().side();
    if l == 0 || 2 * l + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "window radius {l} out of range for N = {n}"
        )));
    }
    let area = ((2 * l + 1) * (2 * l + 1)) as f64;
    Ok(sliding_box_counts(config, l)
        .into_iter()
        .map(|c| c as f64 / area)
        .collect())
}

/// Fraction of sites x whose box `B_p(x)` holds at least `|B_p| - 1`
/// particles (the complement of the "no full clusters" event).
pub fn full_cluster_fraction(config: &Configuration, p: usize) -> f64 {
    let n = config.geometry().side();
    let cap = ((2 * p + 1) * (2 * p + 1)) as u32;
    let hits = sliding_box_counts(config, p)
        .into_iter()
        .filter(|&c| c >= cap - 1)
        .count();
    hits as f64 / (n * n) as f64
}

/// Per-coordinate mean squared displacement of a displacement list.
pub fn mean_square_displacement(disp: &[(i64, i64)]) -> (f64, f64) {
    if disp.is_empty() {
        return (0.0, 0.0);
    }
    let k = disp.len() as f64;
    let sx: f64 = disp.iter().map(|d| (d.0 * d.0) as f64).sum();
    let sy: f64 = disp.iter().map(|d| (d.1 * d.1) as f64).sum();
    (sx / k, sy / k)
}
