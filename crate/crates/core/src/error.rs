use num_complex::Complex64;
use thiserror::Error;

/// Failure categories shared by every module.
///
/// The CLI maps these onto exit codes, so the grouping into input,
/// hypothesis and numerical failures matters more than the exact variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("map is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("hypothesis violated: {reason}")]
    Hypothesis {
        reason: String,
        witness: Option<Vec<Complex64>>,
    },

    #[error("eigenvalue within {distance:e} of the integration contour; choose a different radius")]
    NearContour { distance: f64 },

    #[error("no convergence after {iterations} iterations (best estimate {best:e})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn hypothesis(reason: impl Into<String>) -> Self {
        Error::Hypothesis {
            reason: reason.into(),
            witness: None,
        }
    }

    pub fn hypothesis_at(reason: impl Into<String>, witness: Vec<Complex64>) -> Self {
        Error::Hypothesis {
            reason: reason.into(),
            witness: Some(witness),
        }
    }

    /// Coarse category used for triage.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidInput(_)
            | Error::Json(_)
            | Error::Io(_) => ErrorKind::Input,
            Error::NotHomogeneous(_) | Error::Hypothesis { .. } => ErrorKind::Hypothesis,
            Error::NearContour { .. } | Error::NonConvergence { .. } | Error::Numerical(_) => {
                ErrorKind::Numerical
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Hypothesis,
    Numerical,
}

pub type Result<T> = std::result::Result<T, Error>;
