use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] slereg_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}, row {row}: {detail}")]
    Malformed { path: String, row: usize, detail: String },

    #[error("config {path}: {detail}")]
    Config { path: String, detail: String },

    #[error("config hash mismatch: output directory was created by {found}, current config hashes to {expected}")]
    HashMismatch { expected: String, found: String },

    #[error("{flagged} of {total} derivative samples flagged near a slit base (limit {limit})")]
    TooManyFlagged { flagged: usize, total: usize, limit: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    pub(crate) fn config(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::Config { path: path.into(), detail: detail.into() }
    }
}
