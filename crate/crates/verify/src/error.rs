use thiserror::Error;

/// Errors reported by the finite-state verification layer.
#[derive(Debug, Error)]
pub enum VerifyError {
    /// A builder was asked for a state space beyond the enumeration guard.
    #[error("state space has {states} states, exceeding the limit of {limit}")]
    StateSpaceTooLarge { states: usize, limit: usize },

    /// Invalid model or solver parameter.
    #[error("bad parameter: {0}")]
    BadParameter(String),

    /// An operation was invoked on a generator of the wrong kind.
    #[error("unsupported for this generator: {0}")]
    UnsupportedOperation(String),

    /// A linear solve did not reach the required residual.
    #[error("solver residual {residual:.3e} above tolerance {tolerance:.3e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    #[error(transparent)]
    Core(#[from] fluctua_core::CoreError),

    #[error(transparent)]
    Reflected(#[from] fluctua_reflected::ReflectedError),

    #[error(transparent)]
    Zrp(#[from] fluctua_zrp::ZrpError),

    #[error(transparent)]
    Oracle(#[from] fluctua_oracle::OracleError),
}
