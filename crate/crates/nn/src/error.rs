use std::path::PathBuf;

use posit_core::PositError;

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error(transparent)]
    Posit(#[from] PositError),
    #[error("invalid backend `{spec}`: {reason}")]
    Backend { spec: String, reason: String },
    #[error("no compiled scalar type for {kind} <{n},{es}>; supported: {supported}")]
    UnsupportedFormat {
        kind: &'static str,
        n: u32,
        es: u32,
        supported: String,
    },
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, NnError>;
