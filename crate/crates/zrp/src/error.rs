use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZrpError {
    #[error("rate function must satisfy τ(0) = 0, τ(1) > 0, τ non-decreasing: {0}")]
    DegenerateRate(String),
    #[error("fugacity {a} is at or beyond the convergence radius: {reason}")]
    FugacityOutOfRange { a: f64, reason: String },
    #[error("target density {0} is not attainable (≥ R*)")]
    DensityOutOfRange(f64),
    #[error("replica mismatch: {0}")]
    MismatchedReplicas(String),
    #[error("{total} particles on {n_sites} sites is outside the tabulated support")]
    InfeasibleTotal { n_sites: usize, total: u64 },
    #[error("rejection sampler exhausted its budget of {0} tries")]
    RejectionBudget(u64),
    #[error(transparent)]
    Core(#[from] fluctua_core::CoreError),
}
