use thiserror::Error;

use crate::complex::Simplex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("simplex {0} is not in the complex")]
    SimplexAbsent(Simplex),
    #[error("point is not in the interior of {0}")]
    NotInterior(Simplex),
    #[error("point is not supported by any simplex of the complex")]
    PointOutside,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("subcomplex is not contained in the ambient complex")]
    NotSubcomplex,
    #[error("vertex {0} has no value")]
    MissingValue(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("alpha must be positive")]
    NonPositiveAlpha,
    #[error("inequality systems require the max-norm")]
    NormRequired,
    #[error("invalid sphere map: {0}")]
    InvalidSphereMap(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("non-polynomial expression: {0}")]
    NonPolynomial(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
