use thiserror::Error;

/// Every failure the library reports.
///
/// `Input` and `Contract` are caller mistakes (bad data, violated
/// preconditions). `Budget` and `Resource` mean the request was well formed
/// but could not be finished within the configured limits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("precondition failed: {0}")]
    Contract(String),

    #[error("search budget exhausted after {nodes} nodes: best found {lower}, upper bound {upper}")]
    Budget { nodes: u64, lower: usize, upper: usize },

    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Contract(_) => 1,
            Error::Budget { .. } | Error::Resource(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
