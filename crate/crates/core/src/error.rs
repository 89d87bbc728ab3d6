use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint (C_m) violated: r = {r} < (m+2)/(m+4) = {bound} for m = {m}")]
    ConstraintViolation { m: u32, r: f64, bound: f64 },

    #[error("the limit theorem requires r >= 1, got r = {0}")]
    RequiresRAtLeastOne(f64),

    #[error("covariance is not positive semidefinite: min eigenvalue {min} vs max {max}")]
    NotPositiveSemidefinite { min: f64, max: f64 },

    #[error("covariance is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("observed covariance block is singular (condition number {condition_number:e})")]
    SingularObservedBlock { condition_number: f64 },

    #[error("zero variance Gaussian is a point mass; use the atom-aware convolution path")]
    DegenerateVariance,

    #[error("measure is not normalized (mass {0})")]
    Unnormalized(f64),

    #[error("measure has zero mass")]
    ZeroMass,

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("value overflows f64 (log value {0})")]
    Overflow(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
