use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation accepts.
    #[error("input domain error: {0}")]
    InputDomain(String),

    /// A configuration value or structure violates its invariants.
    #[error("configuration error: {0}")]
    Config(String),

    /// The dynamics produced non-finite weights.
    #[error("numeric failure at step {step}: {message}")]
    NumericFailure { step: u64, message: String },

    /// A graph file could not be parsed or validated.
    #[error("{}{}: {message}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    GraphFile {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
