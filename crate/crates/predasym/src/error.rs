//! Errors for IO and command-line use, with their exit codes.

use std::fmt;
use std::path::Path;

use predasym_core::Error as CoreError;

#[derive(Debug)]
pub enum Error {
    Core(CoreError),
    /// Unreadable input or malformed file contents.
    Invalid(String),
    /// Failure writing results.
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(path: &Path, e: std::io::Error) -> Self {
        Error::Invalid(format!("{}: {e}", path.display()))
    }

    pub(crate) fn output(path: &Path, e: std::io::Error) -> Self {
        Error::Output(format!("{}: {e}", path.display()))
    }

    /// 2 for invalid input or configuration, 3 for runtime and numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) => 2,
            Error::Output(_) => 3,
            Error::Core(e) => match e {
                CoreError::Diverged { .. }
                | CoreError::SingularCovariance
                | CoreError::DegenerateDistances { .. }
                | CoreError::RejectionLimit { .. } => 3,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Core(e) => write!(f, "{e}"),
            Error::Invalid(m) | Error::Output(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Error {}

impl From<CoreError> for Error {
    fn from(e: CoreError) -> Self {
        Error::Core(e)
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Output(e.to_string()),
            _ => Error::Invalid(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Output(e.to_string())
        } else {
            Error::Invalid(e.to_string())
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Output(e.to_string())
    }
}
