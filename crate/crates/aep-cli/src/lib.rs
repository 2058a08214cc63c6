//! Orchestration layer for the active exclusion process: configuration,
//! manifests, replica running, the PDE and self-diffusion commands, and the
//! hydrodynamic comparison experiment.

pub mod compare;
pub mod config;
pub mod exactcheck_cmd;
pub mod manifest;
pub mod pde_cmd;
pub mod runner;
pub mod selfdiff_cmd;
