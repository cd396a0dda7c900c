use thiserror::Error;

/// Errors of the simulation layer and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or argument.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Library error.
    #[error(transparent)]
    Core(#[from] polarcm_core::Error),
    /// File or stream failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Malformed JSON.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    /// CSV writer failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// Worker pool could not be created.
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
