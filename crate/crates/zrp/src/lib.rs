//! Zero-range process on a segment: invariant laws, exact canonical
//! samplers, event-driven dynamics in diffusive time, and a monotone
//! level-clock coupling for contraction experiments.
//!
//! Particles sit on sites `{1, …, N}`; a site with `k` particles pushes one
//! to each admissible neighbour at rate `(N²/2)·τ(k)`, where the rate
//! function `τ` is zero at zero, positive at one, and non-decreasing.  The
//! boundary sites only push inward, so the particle number is conserved and
//! the conditioned product of the single-site laws `ν_a` is reversible.

pub mod canonical;
pub mod coupling;
pub mod dynamics;
mod error;
pub mod law;
pub mod rate;

pub use canonical::{sample_invariant, CanonicalSampler};
pub use coupling::{envelope_pair, height_distance, CoupledZrp};
pub use dynamics::{q_field, Jump, ZrpDynamics};
pub use error::ZrpError;
pub use law::{build_nu, phi_of, GrandCanonicalLaw, Moments, DEFAULT_TAIL_TOL, PHI_TOL};
pub use rate::{Growth, RateFunction};
