use std::path::PathBuf;

/// Failures surfaced by the command-line layer, each with a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{source_name}: parse error at byte offset {offset}: {message}")]
    Parse { source_name: String, offset: usize, message: String },

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),

    #[error("{0}")]
    Domain(#[from] qcorr_core::Error),

    #[error("suite failed: {0}")]
    SuiteFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailed(_) => 1,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Read { .. } => 2,
            CliError::Write(_) | CliError::Domain(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
