//! Error type shared across the crate.

use std::fmt;
use std::io;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// A caller-supplied value lies outside an operation's domain.
    Domain(String),
    /// A machine or region description violates its invariants; one message
    /// per violation.
    InvalidModel(Vec<String>),
    /// A data file failed to parse. `line` is 1-based when the offence is
    /// attributable to a single line.
    Parse {
        path: String,
        line: Option<usize>,
        message: String,
    },
    Io {
        path: String,
        source: io::Error,
    },
    /// An internal consistency check failed; indicates a bug, not bad input.
    Internal(String),
}

impl Error {
    pub fn parse(path: impl Into<String>, line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "{msg}"),
            Error::InvalidModel(violations) => {
                write!(f, "invalid model: {}", violations.join("; "))
            }
            Error::Parse {
                path,
                line: Some(line),
                message,
            } => write!(f, "{path}:{line}: {message}"),
            Error::Parse {
                path,
                line: None,
                message,
            } => write!(f, "{path}: {message}"),
            Error::Io { path, source } => write!(f, "{path}: {source}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
