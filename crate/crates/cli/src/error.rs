//! Error-to-exit-code mapping for the CLI.
//!
//! Exit codes: 0 success, 1 domain errors, 2 usage errors (via clap),
//! 3 file and parse errors. Every failure prints one machine-readable
//! `ERROR <code>: <detail>` line on stderr.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use spltree::{TreeError, XmlError};

#[derive(Debug)]
pub enum CliError {
    /// Registry rule violations (unknown node, duplicate id, in use, ...).
    Domain(TreeError),
    /// A store or import file failed to parse or validate.
    File(XmlError),
    /// Filesystem trouble.
    Io { path: PathBuf, source: std::io::Error },
    /// Bad invocation not caught by argument parsing.
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::File(e) => e.code(),
            CliError::Io { .. } => "Io",
            CliError::Usage(_) => "Usage",
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Domain(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::File(_) | CliError::Io { .. } => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(e) => e.fmt(f),
            CliError::File(e) => e.fmt(f),
            CliError::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            CliError::Usage(message) => f.write_str(message),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        CliError::Domain(e)
    }
}

impl From<XmlError> for CliError {
    fn from(e: XmlError) -> Self {
        CliError::File(e)
    }
}

pub fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
