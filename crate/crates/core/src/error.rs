use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the estimators, simulators and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed arguments: wrong scheme, dimension mismatch, empty data.
    #[error("argument error: {0}")]
    Argument(String),
    /// The data admit no estimate (e.g. all-zero homodyne samples).
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}
