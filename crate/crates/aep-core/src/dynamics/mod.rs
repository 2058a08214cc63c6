//! The accelerated Markov dynamics: rates, event-driven simulation, and exact
//! generator application for tests.

mod generator;
mod rates;
mod simulate;

pub use generator::{
    alignment_rate, apply_exchange_part, apply_generator, apply_glauber_part, current_asym,
    current_sym, DEFAULT_QUADRATURE,
};
pub use rates::{
    bessel_i0, drift_component, glauber_density, jump_rate, resultant, sample_glauber_angle,
    sample_von_mises, two_type_up_probability,
};
pub use simulate::{
    AdvanceReport, AngleKind, Event, EventCounters, ModelParams, SimulationState,
};
