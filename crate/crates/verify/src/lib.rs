//! Cross-model verification layer: enumerated generators with exact rational
//! invariance checks, dense and Monte Carlo resolvents, the discrete
//! stationary integration-by-parts identity, the free/reflection split of the
//! pair generator, Lipschitz contraction measurements, and convergence
//! reports of discrete stationary pairings against their continuum limits.
//!
//! Everything here treats the model crates as black boxes: state spaces are
//! enumerated through their public dynamics, invariant weights are rebuilt
//! from scratch, and all structural identities (stationarity, reversibility,
//! resolvent bounds) are recomputed in exact rational arithmetic or with
//! explicitly tracked numerical tolerances.

pub mod error;
pub mod generator;
pub mod ibp;
pub mod lipschitz;
pub mod report;
pub mod resolvent;
pub mod split;

pub use error::VerifyError;
pub use generator::{
    gradphi_generator, linear_tau, reflected_generator, zrp_generator, Embedding,
    FiniteGenerator, PsiPairing, StationarityReport, METRIC_LIMIT, STATE_LIMIT,
};
pub use ibp::{invariant_mass_residual, sigma_pairing_exact, verify_discrete_ibpf, IbpReport};
pub use lipschitz::{lipschitz_ratio, lipschitz_seminorm, LipschitzReport};
pub use report::{
    reflected_sigma_exact, reflected_sigma_mc, reflected_sigma_report, zrp_continuum_coefficients,
    zrp_sigma_mc, zrp_sigma_report, ComplexMc, ReflectedReportConfig, ReflectedSigmaExact,
    ReflectedSigmaMc, SigmaConvergenceReport, SigmaRow, ZrpReportConfig,
};
pub use resolvent::{resolvent_identity_gap, resolvent_mc, resolvent_solve, McEstimate, ResolventSolution};
pub use split::{pair_action, split_generator_action, PairAction, PairCoefficients, SplitAction};
