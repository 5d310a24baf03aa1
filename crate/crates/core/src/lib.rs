//! Shared foundation for the `fluctua` workspace.
//!
//! Everything here is model-agnostic: rescaled lattice fields with exact
//! piecewise-linear integration, ±1 path pairs with contact/corner queries,
//! occupation vectors, compactly supported C² test functions, deterministic
//! RNG stream derivation, and a small statistics toolkit (streaming moment
//! accumulators, KS / chi-square tests, autocorrelation and batch means).
//!
//! Design rules observed throughout the workspace:
//! * lattice data stays integer-valued as long as possible; division by the
//!   scaling factors happens once, when a field is materialized;
//! * every integral of piecewise-linear data is computed exactly (closed-form
//!   per cell), so simulators and finite-state algebra agree to rounding;
//! * all randomness flows through [`rng::stream`], keyed by
//!   `(seed, purpose, replica)`, which makes replica-parallel runs
//!   reproducible independent of scheduling.

pub mod error;
pub mod fenwick;
pub mod field;
pub mod occupation;
pub mod path;
pub mod rng;
pub mod stats;
pub mod testfn;

pub use error::CoreError;
pub use field::FluctuationField;
pub use occupation::OccupationVector;
pub use path::{corner_at, Corner, PathPair, Role};
pub use testfn::{Smoothness, TestFunction};
