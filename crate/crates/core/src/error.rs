use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    Config(String),

    /// Matrix/vector dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A numerical operation failed (NaN, singular system, non-PSD matrix).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File I/O failed.
    #[error("i/o failure at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A data file has an unexpected format or version.
    #[error("bad file format: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
