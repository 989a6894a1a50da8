use std::fmt;
use std::path::{Path, PathBuf};

use dragrepo_core::engine::EngineError;
use dragrepo_core::repository::RepoError;
use dragrepo_core::transfer::TransferError;

#[derive(Debug)]
pub enum CliError {
    Repo(RepoError),
    Transfer(TransferError),
    /// A trace line that cannot be parsed or breaks the trace rules.
    Trace {
        line: usize,
        message: String,
    },
    /// The engine refused an event from the trace.
    Engine {
        line: usize,
        error: EngineError,
    },
    Io {
        path: PathBuf,
        message: String,
    },
    Usage(String),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Repo(e) => e.name(),
            CliError::Transfer(e) => e.name(),
            CliError::Trace { .. } => "MalformedTrace",
            CliError::Engine { error, .. } => error.name(),
            CliError::Io { .. } => "IoFailure",
            CliError::Usage(_) => "Usage",
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Repo(e) => write!(f, "{e}"),
            CliError::Transfer(e) => write!(f, "{e}"),
            CliError::Trace { line, message } => {
                write!(f, "MalformedTrace: line {line}: {message}")
            }
            CliError::Engine { line, error } => write!(f, "{error} (trace line {line})"),
            CliError::Io { path, message } => write!(f, "IoFailure: {}: {message}", path.display()),
            CliError::Usage(m) => write!(f, "Usage: {m}"),
        }
    }
}

impl From<RepoError> for CliError {
    fn from(e: RepoError) -> Self {
        CliError::Repo(e)
    }
}

impl From<TransferError> for CliError {
    fn from(e: TransferError) -> Self {
        CliError::Transfer(e)
    }
}
