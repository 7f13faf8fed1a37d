use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid code dimensions (n = {n}, k = {k}): need 0 < k <= n")]
    InvalidDimensions { n: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid bit value {0}; expected 0 or 1")]
    InvalidBit(u8),

    #[error("code rate must be in (0, 1], got {0}")]
    InvalidRate(f64),

    #[error("noise variance must be positive and finite, got {0}")]
    InvalidVariance(f64),

    #[error("invalid schedule configuration: {0}")]
    InvalidSchedule(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("target BLER {target} is not bracketed by the curve; nearest endpoint at {nearest_db} dB")]
    OutOfRange { target: f64, nearest_db: f64 },

    #[error("scheduler invariant violated at cycle {cycle}: {message}")]
    Internal { cycle: u64, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
