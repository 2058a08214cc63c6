//! The discrete periodic torus and boxes on it.

use serde::{Deserialize, Serialize};

/// The four nearest-neighbor displacements `±e_1`, `±e_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

pub const ALL_DIRECTIONS: [Direction; 4] = [
    Direction::XPlus,
    Direction::XMinus,
    Direction::YPlus,
    Direction::YMinus,
];

impl Direction {
    /// Displacement vector of this direction.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Direction::XPlus => (1, 0),
            Direction::XMinus => (-1, 0),
            Direction::YPlus => (0, 1),
            Direction::YMinus => (0, -1),
        }
    }

    /// Coordinate axis (0 for `e_1`, 1 for `e_2`).
    pub fn axis(self) -> usize {
        match self {
            Direction::XPlus | Direction::XMinus => 0,
            Direction::YPlus | Direction::YMinus => 1,
        }
    }

    /// +1 or -1 along the axis.
    pub fn sign(self) -> f64 {
        match self {
            Direction::XPlus | Direction::YPlus => 1.0,
            Direction::XMinus | Direction::YMinus => -1.0,
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::XPlus => Direction::XMinus,
            Direction::XMinus => Direction::XPlus,
            Direction::YPlus => Direction::YMinus,
            Direction::YMinus => Direction::YPlus,
        }
    }
}

/// The N x N periodic torus. Sites are flat indices `x + N*y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGeometry {
    n: usize,
}

impl TorusGeometry {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "torus side must be positive");
        TorusGeometry { n }
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        self.n * self.n
    }

    fn wrap(&self, c: i64) -> usize {
        let n = self.n as i64;
        (((c % n) + n) % n) as usize
    }

    /// Flat index of wrapped coordinates.
    pub fn index(&self, x: i64, y: i64) -> usize {
        self.wrap(x) + self.n * self.wrap(y)
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.n, site / self.n)
    }

    /// Neighboring site in the given direction (periodic wraparound).
    pub fn neighbor(&self, site: usize, dir: Direction) -> usize {
        let (x, y) = self.coords(site);
        let (dx, dy) = dir.delta();
        self.index(x as i64 + dx, y as i64 + dy)
    }

    /// Site translated by a vector (torus group law).
    pub fn translate_site(&self, site: usize, v: (i64, i64)) -> usize {
        let (x, y) = self.coords(site);
        self.index(x as i64 + v.0, y as i64 + v.1)
    }

    pub fn iter_sites(&self) -> impl Iterator<Item = usize> {
        0..self.sites()
    }
}

/// The box `B_l(x)` of side `2l+1` centered at `center`, on a torus.
#[derive(Debug, Clone, Copy)]
pub struct BlockBox {
    pub center: (i64, i64),
    pub radius: usize,
}

impl BlockBox {
    pub fn new(center: (i64, i64), radius: usize) -> Self {
        BlockBox { center, radius }
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sites of the box on the given torus (wrapped; may repeat if the box
    /// wraps around onto itself).
    pub fn sites(&self, geom: &TorusGeometry) -> Vec<usize> {
        let l = self.radius as i64;
        let mut out = Vec::with_capacity(self.len());
        for dy in -l..=l {
            for dx in -l..=l {
                out.push(geom.index(self.center.0 + dx, self.center.1 + dy));
            }
        }
        out
    }
}
