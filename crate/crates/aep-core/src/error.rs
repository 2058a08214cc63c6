use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angle measure: {0}")]
    InvalidMeasure(String),
    #[error("initial profile has total density >= 1 at u = ({0}, {1})")]
    ProfileMassTooLarge(f64, f64),
    #[error("site {0} is empty")]
    EmptySite(usize),
    #[error("particle count {count} exceeds box capacity {capacity}")]
    BoxOverflow { count: usize, capacity: usize },
    #[error("drift strength lambda = {lambda} exceeds lattice side N = {n}")]
    DriftTooStrong { lambda: f64, n: usize },
    #[error("state space too large: {0} states")]
    StateSpaceTooLarge(usize),
    #[error("fewer than two empty sites in the box; exclusion dynamics is not irreducible")]
    NotEnoughHoles,
    #[error("configurations carry different angle multisets on the box")]
    MultisetMismatch,
    #[error("time step {dt} violates the stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },
    #[error("mismatched grids: {0}")]
    GridMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
