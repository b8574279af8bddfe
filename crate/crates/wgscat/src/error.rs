use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("metadata output: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] wgscat_core::Error),
}
