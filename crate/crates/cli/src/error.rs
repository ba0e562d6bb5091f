use std::path::{Path, PathBuf};
use std::process::ExitCode;

use gdt_core::dataset::DatasetError;
use gdt_core::metrics::MetricError;

/// Failures, grouped by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: input was read but did not validate.
    Invalid(String),
    /// Exit 2: bad flags or flag combinations.
    Usage(String),
    /// Exit 3.
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Usage(m) => f.write_str(m),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Invalid(other.to_string()),
        }
    }
}
