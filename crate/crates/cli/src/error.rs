//! CLI error type and exit-code mapping.

use std::fmt;
use std::path::PathBuf;

use omp_core::OmpError;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    /// Malformed matrix/label file; `detail` names the offending byte offset
    /// or line.
    Format { path: PathBuf, detail: String },
    Usage(String),
    Core(OmpError),
}

impl CliError {
    pub fn format(path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        Self::Format { path: path.into(), detail: detail.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit code: input problems exit 2 (degeneracy in strict mode
    /// exits 3 and is handled by the caller).
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Self::Format { path, detail } => write!(f, "{}: {detail}", path.display()),
            Self::Usage(msg) => write!(f, "{msg}"),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<OmpError> for CliError {
    fn from(e: OmpError) -> Self {
        Self::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
