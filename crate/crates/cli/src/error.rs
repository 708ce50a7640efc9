use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lovx_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
}

/// Exit code for configuration and input errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit code when eigen certification fails.
pub const EXIT_NOT_CERTIFIED: i32 = 2;
