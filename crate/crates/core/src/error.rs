use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("theta matrix is not skew-symmetric at ({row}, {col})")]
    NotSkewSymmetric { row: usize, col: usize },

    #[error("operands carry different deformation matrices")]
    ThetaMismatch,

    #[error("coefficient at {mode:?} is not finite")]
    NonFinite { mode: Vec<i64> },

    #[error("product support leaves the box of radius {radius}")]
    SupportOverflow { radius: i64 },

    #[error("time must be {requirement}, got {value}")]
    InvalidTime {
        requirement: &'static str,
        value: f64,
    },

    #[error("t = {t} too large for witness construction (k_t = 0)")]
    WitnessUnavailable { t: f64 },

    #[error("series diverges, k must exceed n/2 (k = {k}, n = {n})")]
    DivergentSeries { k: u32, n: usize },

    #[error("ball radius {radius} must exceed twice the datum norm {norm}")]
    BallTooSmall { radius: f64, norm: f64 },

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("periodization tail {tail:e} above tolerance with K = {images}")]
    TailTooLarge { tail: f64, images: i64 },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
