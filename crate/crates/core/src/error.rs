use thiserror::Error;

/// Errors shared by the lattice/field foundation.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("field needs at least two grid points, got {0}")]
    FieldTooShort(usize),

    #[error("non-finite value at index {0}")]
    NotFinite(usize),

    #[error("grids with {left} and {right} cells have no common refinement below {max} cells")]
    GridMismatch { left: usize, right: usize, max: usize },

    #[error("invalid lattice path: {0}")]
    InvalidPath(String),

    #[error("invalid occupation vector: {0}")]
    InvalidOccupation(String),

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("empty sample")]
    EmptySample,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}
