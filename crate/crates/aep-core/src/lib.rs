//! Core library for the 2D active exclusion process: lattice configurations
//! and sampling, event-driven Markov dynamics, measurement of empirical
//! fields, tagged-particle self-diffusion estimation, a finite-difference
//! solver for the cross-diffusion hydrodynamic equation, and exact
//! finite-volume checks of the underlying generator identities.

pub mod dynamics;
pub mod error;
pub mod exactcheck;
pub mod hydro;
pub mod io;
pub mod lattice;
pub mod observables;
pub mod rng;
pub mod selfdiff;

pub use error::{Error, Result};
