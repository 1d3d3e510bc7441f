use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A method failed to train or predict on otherwise valid inputs.
    #[error("{0}")]
    Method(String),
    /// Failures while reading or validating inputs.
    #[error(transparent)]
    Input(#[from] poki_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Method(_) => 1,
            _ => 2,
        }
    }
}
