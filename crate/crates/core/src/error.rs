use std::path::PathBuf;

use thiserror::Error;

/// Where in an input a parse problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Byte(usize),
    Line(usize),
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Position::Byte(b) => write!(f, "byte {b}"),
            Position::Line(l) => write!(f, "line {l}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{format} parse error at {position}: {message}")]
    Parse {
        format: &'static str,
        position: Position,
        message: String,
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(format: &'static str, position: Position, message: impl Into<String>) -> Self {
        Error::Parse {
            format,
            position,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by reading or decoding input, as opposed to a bad request.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Parse { .. } | Error::InvalidImage(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
