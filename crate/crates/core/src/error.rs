use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("matrix is not symmetric/Hermitian within {tol:e} (max deviation {deviation:e})")]
    Symmetry { tol: f64, deviation: f64 },

    #[error("operator is not unitary within {tol:e}")]
    Unitarity { tol: f64 },

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("no exit-probability peak in window [{start}, {end}]")]
    PeakNotFound { start: f64, end: f64 },

    #[error("empty set: {0}")]
    Empty(String),

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error("numerical invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}
