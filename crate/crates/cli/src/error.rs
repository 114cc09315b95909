use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::ingest::IngestError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write to {path}: {source}")]
    Output { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error(transparent)]
    Model(#[from] critnet_core::Error),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const DATA: i32 = 3;
    pub const INSUFFICIENT: i32 = 4;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use critnet_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Output { .. } => exit::CONFIG,
            CliError::Ingest(IngestError::TooShort { .. }) => exit::INSUFFICIENT,
            CliError::Ingest(_) => exit::DATA,
            CliError::Model(e) => match e {
                E::InvalidConfiguration(_) | E::Domain(_) | E::Truncation { .. } => exit::CONFIG,
                E::InsufficientData(_) | E::NoVariance => exit::INSUFFICIENT,
                E::SelfLoop(_) | E::NoEdges | E::NotTriggered(_) => exit::DATA,
            },
        }
    }

    pub(crate) fn output(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Output { path, source }
    }
}
