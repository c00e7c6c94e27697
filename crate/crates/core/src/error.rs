use thiserror::Error;

/// Errors produced by grid construction, models, bounds and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("matrix is not a symmetric circulant: entry ({row}, {col}) disagrees with the first row")]
    NotCirculant { row: usize, col: usize },

    #[error("transfer function is singular at omega = {omega} (undamped resonance on a grid bin)")]
    ResonanceSingularity { omega: f64 },

    #[error("prior spectrum vanishes at omega = {omega}; its covariance has no inverse")]
    SingularPrior { omega: f64 },

    #[error("total Fisher information is singular at omega = {omega}")]
    SingularFisher { omega: f64 },

    #[error("prior model has no finite-dimensional state-space form: {0}")]
    UnsupportedPrior(String),

    #[error("covariance lost positive-semidefiniteness at step {step}: min eigenvalue {min_eigenvalue:e}, max {max_eigenvalue:e}")]
    NonPsdCovariance {
        step: usize,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("dense matrix of order {n} exceeds the cap of {cap}")]
    DenseCapExceeded { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
