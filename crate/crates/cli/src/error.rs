use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot load system: {0}")]
    SystemLoad(String),
    /// A module refused or failed a computation.
    #[error("{context}: {message}")]
    Module { context: &'static str, message: String },
}

impl CliError {
    pub fn module(context: &'static str, err: impl std::fmt::Display) -> Self {
        CliError::Module {
            context,
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::SystemLoad(_) => "system_load",
            CliError::Module { .. } => "module",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Module { .. } => 1,
            _ => 2,
        }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
