use std::io;
use std::path::PathBuf;

use finitemix_core::consensus::ConsensusError;
use finitemix_core::dsgd::DsgdError;
use finitemix_core::io::FormatError;
use finitemix_core::BuildError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Consensus(#[from] ConsensusError),
    #[error(transparent)]
    Dsgd(#[from] DsgdError),
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Build(e) => e.kind(),
            CliError::Consensus(e) => e.kind(),
            CliError::Dsgd(e) => e.kind(),
            CliError::Format { source, .. } => source.kind(),
            CliError::Io { .. } => "Io",
            CliError::Config(_) => "BadConfig",
            CliError::Usage(_) => "Usage",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
