use thiserror::Error;

/// Errors raised by the state-transfer toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("not a linear-spectrum PST chain: {0}")]
    NotPst(String),

    #[error("no transfer peak with amplitude above {threshold} in [0, {window}]")]
    NoTransferPeak { threshold: f64, window: f64 },

    #[error("inverse eigenvalue reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("trace identity mismatch: structural {structural}, spectral {spectral}")]
    TraceMismatch { structural: f64, spectral: f64 },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotPst(_)
                | Error::NoTransferPeak { .. }
                | Error::Reconstruction(_)
                | Error::TraceMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
