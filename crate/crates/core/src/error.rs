use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("point {point:?} is too close to the boundary (distance {distance:e} < {min:e})")]
    TooCloseToBoundary { point: Vec<f64>, distance: f64, min: f64 },

    #[error("point {point:?} is mapped to infinity by an inversion")]
    MapsToInfinity { point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no admissible initial path between {from:?} and {to:?}")]
    NoInitialPath { from: Vec<f64>, to: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
