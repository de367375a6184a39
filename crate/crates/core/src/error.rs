use thiserror::Error;

use crate::matrix::MatrixError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Matrix(#[from] MatrixError),

    #[error("gamma shape {shape} for diagonal entry {index} is not positive")]
    InvalidShape { index: usize, shape: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sample (seed {seed}, stream {stream}): {source}")]
    Sample {
        seed: u64,
        stream: u64,
        #[source]
        source: MatrixError,
    },

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("target probability {target} outside the interpolated range [{lo}, {hi}]")]
    NoBracket { target: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
