use thiserror::Error;

use crate::ritz::TruncationStep;

/// Errors raised by the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("not normalizable: {0}")]
    NotNormalizable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("formula {formula} does not apply: {reason}")]
    FormulaMismatch { formula: String, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("monotone on bracket [{lo}, {hi}]: no interior minimum detected")]
    MonotoneOnBracket { lo: f64, hi: f64 },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("did not converge: {0}")]
    NoConvergence(String),

    #[error("spectrum not converged at the truncation cap ({} steps recorded)", history.len())]
    SpectrumNotConverged { history: Vec<TruncationStep> },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("box too small: {0}")]
    BoxTooSmall(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
