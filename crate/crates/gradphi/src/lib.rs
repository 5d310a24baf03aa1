//! Gradient-interface Gibbs sampler: heat-bath dynamics for height profiles
//! pinned at both ends, driven by a convex nearest-neighbor potential, with
//! continuous or integer heights and an optional hard wall at zero.
//!
//! This simulator is deliberately a thin model plugin: the heat-bath rule
//! fixes the dynamics completely, only the conditional resampling law varies
//! with the potential, and no limit-theorem acceptance gates are wired to it.

pub mod conditional;
pub mod dynamics;
mod error;
pub mod potential;
pub mod state;

pub use conditional::{sample_conditional, truncated_gaussian};
pub use dynamics::{evolve, heat_bath_update};
pub use error::GradPhiError;
pub use potential::{Potential, Variant};
pub use state::{gaussian_equilibrium, GradPhiState};
