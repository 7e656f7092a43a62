use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Every failed rule, not just the first.
    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("singular configuration: particles {i} and {j} coincide and softening is zero")]
    Singular { i: usize, j: usize },

    #[error("coincident-time kernel is singular at zero separation")]
    ZeroSeparation,

    #[error("aliasing: cutoff {cutoff} times spacing {spacing} must be below pi")]
    Aliasing { cutoff: f64, spacing: f64 },

    #[error("time grid is not uniform")]
    NonUniformGrid,

    #[error("noise spectrum is negative ({value:e}) at omega = {omega}")]
    NegativeSpectrum { omega: f64, value: f64 },

    #[error("series too short: {len} samples, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("memory window {window} is shorter than the kernel support {required}")]
    MemoryUnderrun { window: f64, required: f64 },

    #[error("non-positive value {value} at index {index} inside the fit window")]
    NonPositive { index: usize, value: f64 },

    #[error("insufficient run length: {have:.1} relaxation times, need {need:.1}")]
    InsufficientRun { have: f64, need: f64 },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("missing data: {0}")]
    Missing(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Validation(_) | Error::Json { .. } => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}
