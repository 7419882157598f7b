use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("value out of representable range at t = {0}")]
    OutOfRange(f64),
    #[error("could not bracket a root for y = {0}")]
    BracketFailure(f64),
    #[error("convexity violated near t = {0}")]
    NonConvex(f64),
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("region has zero measure")]
    ZeroMeasure,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("grids or functions live on different domains")]
    DomainMismatch,
    #[error("Young function is not in B_{0}")]
    NotInBp(f64),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
