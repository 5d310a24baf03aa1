use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("grid resolution {0} too coarse for this sampler")]
    GridTooCoarse(usize),
    #[error("r-quadrature interval [{0}, {1}] touches the singular endpoints of (0,1)")]
    SingularEndpoint(f64, f64),
    #[error(transparent)]
    Core(#[from] fluctua_core::CoreError),
}
