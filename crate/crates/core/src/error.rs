use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant is either an input problem (bad file, bad parameters,
/// not enough data) or a numerical failure (degenerate geometry, rank
/// deficiency, non-convergence). [`Error::is_numerical`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("event {event_id}: {message}")]
    InvalidEvent { event_id: String, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate rotation: {0}")]
    DegenerateRotation(String),

    #[error("rank-deficient design; linearly dependent columns: {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateRotation(_)
                | Error::RankDeficient { .. }
                | Error::NoConvergence { .. }
                | Error::Bracketing(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
