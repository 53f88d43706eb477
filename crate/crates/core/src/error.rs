use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("explicit feature map would need {requested} coordinates (limit {limit})")]
    CapacityExceeded { requested: u128, limit: usize },

    #[error("matrix factorization failed: {0}")]
    Factorization(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("fitting local model for centroid {index}: {source}")]
    LocalFit {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
