use fluctua_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GradPhiError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("conditional law is not normalizable: {0}")]
    NonNormalizable(String),

    #[error("invalid interface state: {0}")]
    InvalidState(String),

    #[error("site {site} is not a free site of an interface with {n_sites} cells")]
    BadSite { site: usize, n_sites: usize },

    #[error(transparent)]
    Core(#[from] CoreError),
}
