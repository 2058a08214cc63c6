//! Lattice geometry, configurations, grand-canonical/canonical measures,
//! product-measure sampling, and the dual-norm metric on angle measures.

mod canonical;
mod config;
mod geometry;
mod measure;
mod profile;
mod sampling;

pub use canonical::{canonical_state_of, sample_canonical, CanonicalState};
pub use config::Configuration;
pub use geometry::{BlockBox, Direction, TorusGeometry, ALL_DIRECTIONS};
pub use measure::{param_distance, AngleMeasure, TWO_PI};
pub use profile::InitialProfile;
pub use sampling::{empirical_angular_density, sample_grand_canonical, sample_product_measure};
