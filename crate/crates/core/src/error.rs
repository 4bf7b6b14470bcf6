use thiserror::Error;

/// Errors raised by the number-field, refinement, solenoid and zero-set layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial is reducible over Z (monic factor with coefficients {factor:?})")]
    Reducible { factor: Vec<i64> },

    #[error("polynomial is not squarefree")]
    Degenerate,

    #[error("degree {0} is not supported (maximum 8)")]
    UnsupportedDegree(usize),

    #[error("precision failure: {0}")]
    Precision(String),

    #[error("dilation is not a certified PV number")]
    NotPisot,

    #[error("mask coefficients sum to {sum} but |alpha| = {expected}")]
    Normalization { sum: f64, expected: f64 },

    #[error("eigenvector for eigenvalue 1: {0}")]
    Eigen(String),

    #[error("infinite product did not reach tolerance within {factors} factors")]
    Nonconvergence { factors: usize },

    #[error("window [{have_min}, {have_max}] does not cover translate support [{need_min}, {need_max}]")]
    WindowTooSmall {
        need_min: i64,
        need_max: i64,
        have_min: i64,
        have_max: i64,
    },

    #[error("shifted window is empty")]
    EmptyWindow,

    #[error("enumeration too large: forecast {forecast:.3e} exceeds limit {limit:.3e}")]
    Size { forecast: f64, limit: f64 },

    #[error("unknown example mask `{0}`")]
    UnknownExample(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Precision(_) | Error::Nonconvergence { .. } | Error::Eigen(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
