use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges or nodes")]
    EmptyGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph has no node timestamps; use a random-walk node order instead")]
    MissingTimestamps,

    #[error("degenerate least-squares fit: every sampled spherical distance is zero")]
    DegenerateFit,

    #[error("correlation undefined: {0} has zero variance")]
    UndefinedCorrelation(&'static str),

    #[error("slerp between (near) antipodal points is ill-conditioned")]
    IllConditioned,

    #[error("png encoding failed: {0}")]
    Encode(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for errors caused by numerical degeneracy of the data rather
    /// than by bad input or arguments.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateFit | Error::UndefinedCorrelation(_) | Error::IllConditioned
        )
    }
}
