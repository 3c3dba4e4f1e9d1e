use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulation, analysis and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("ions {i} and {j} coincide (pair distance is zero)")]
    Singularity { i: usize, j: usize },

    #[error("integration blew up at step {step}: non-finite state")]
    Blowup { step: u64 },

    #[error("winding sum is not an integer (residual {residual:e})")]
    Integrality { residual: f64 },

    #[error("ion ordering along the ring violated at t = {time}: ion {ion} overtook its neighbour")]
    OrderViolation { time: f64, ion: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config hash mismatch in {dir}: stored {stored}, current {current}")]
    ConfigMismatch {
        dir: PathBuf,
        stored: String,
        current: String,
    },

    #[error("{failed} of {total} trajectories failed (more than 1%)")]
    FailureThreshold { failed: usize, total: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than by the physics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::ConfigMismatch { .. } | Error::Domain(_)
        )
    }
}
