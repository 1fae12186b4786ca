use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The configuration space (or input ensemble) is larger than the guard allows.
    #[error("{what} would contain {count} entries, above the limit of {limit}")]
    SizeLimit {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("matrix dimension {dim} exceeds the {algorithm} limit of {limit}")]
    DimensionLimit {
        algorithm: &'static str,
        dim: usize,
        limit: usize,
    },

    #[error("photon count {count} in a single mode exceeds the exact factorial limit of {limit}")]
    FactorialOverflow { count: u32, limit: u32 },

    #[error("input carries {input} photons but output carries {output}")]
    PhotonMismatch { input: u32, output: u32 },

    #[error("mode count mismatch: expected {expected}, got {actual}")]
    ModeMismatch { expected: usize, actual: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e} exceeds {tolerance:e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("invalid optical element: {0}")]
    InvalidElement(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("output distribution sums to {total}, off by more than {tolerance:e}")]
    Normalization { total: f64, tolerance: f64 },

    #[error("cross-check failed for {what}: deviation {deviation:e}")]
    CrossCheck { what: &'static str, deviation: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("post-selection retains no probability mass")]
    EmptyPostSelection,
}

impl Error {
    /// Errors raised because a problem is too large for exact simulation.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::SizeLimit { .. }
                | Error::DimensionLimit { .. }
                | Error::FactorialOverflow { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
