//! Continuum references for the lattice dynamics: exact samplers for the
//! limiting laws (scaled Brownian bridges, normalized excursions, pinned
//! excursions), Ornstein–Uhlenbeck mode statistics, and Monte Carlo
//! evaluators for the stationary-identity functionals with their closed-form
//! Gaussian counterparts.

pub mod bridge;
pub mod concat;
mod error;
pub mod excursion;
pub mod ou;
pub mod quad;
pub mod sigma;

pub use bridge::{sample_bridge, BridgeLaw};
pub use concat::{concat_t_r, sample_conditioned_excursion};
pub use error::OracleError;
pub use excursion::{
    excursion_marginal_cdf, excursion_marginal_density, excursion_marginal_mean, sample_excursion,
    sample_excursion_vervaat,
};
pub use ou::{ou_stats, OUMode};
pub use quad::{adaptive_simpson, gauss_legendre, gauss_legendre_on};
pub use sigma::{
    boundary_prefactor, boundary_quadrature, rotate_to_pair, sigma_limit_pair, sigma_limit_zrp,
    sigma_zrp_gaussian_reference, ComplexEstimate, PairSigmaConfig, PairSigmaEvaluation,
    SigmaEvaluation, SigmaReference,
};
