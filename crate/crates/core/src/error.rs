use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch, {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    /// Gaussian elimination hit a pivot below the scale-relative threshold.
    #[error("singular system: pivot magnitude {pivot:e} below threshold {threshold:e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("calibration target {target} unreachable: rate {rate_at_low_noise} at {low_noise_db} dB, {rate_at_high_noise} at {high_noise_db} dB")]
    Unreachable {
        target: f64,
        low_noise_db: f64,
        rate_at_low_noise: f64,
        high_noise_db: f64,
        rate_at_high_noise: f64,
    },

    #[error("gave up after {attempts} singular redraws in trial {trial}")]
    TooManyRedraws { trial: u64, attempts: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
