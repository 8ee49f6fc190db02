use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid projection: {0}")]
    InvalidProjection(String),

    #[error("dimension {required} exceeds the configured cap {cap} (raise the cap to at least {required})")]
    CapExceeded { required: usize, cap: usize },

    #[error("invalid epsilon schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
