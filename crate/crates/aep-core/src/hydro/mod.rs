//! Deterministic solver and verification tools for the limiting
//! cross-diffusion equation of the active exclusion process.

mod coeffs;
mod field;
mod solver;
mod twotype;
mod weak;

pub use coeffs::{coeff_d, coeff_s, creation_rate, creation_rate_two_type, omega_vector};
pub use field::{AngularDensityField, EMPTY_CELL};
pub use solver::{PdeConfig, PdeSolver, StepStats, TimeScheme};
pub use twotype::{TwoTypeField, TwoTypeSolver};
pub use weak::{pairing, weak_form_residual, TestFunction, WeakFormParams};
