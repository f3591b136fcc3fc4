use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the measurement / filtering / entanglement pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("effective {quadrature} noise is below zero ({value}); sub-vacuum input exceeds the classical noise")]
    Domain { quadrature: &'static str, value: f64 },

    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("spectral factorization failed: {0}")]
    Factorization(String),

    #[error("causal projection failed: {0}")]
    Projection(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("no stabilizing Riccati solution: {0}")]
    NoStabilizingSolution(String),

    #[error("unphysical covariance: smallest symplectic eigenvalue {min_eigenvalue} < 1/2")]
    Physicality { min_eigenvalue: f64 },

    #[error("no entanglement threshold up to ratio {max_ratio} at {laser_db} dB laser noise")]
    ThresholdNotFound { laser_db: f64, max_ratio: f64 },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
