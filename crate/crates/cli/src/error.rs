use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unexpected I/O failure while writing results.
    pub const FAILURE: i32 = 1;
    /// Degenerate statistical input; the message explains the ladder step.
    pub const DEGENERATE: i32 = 2;
    /// Unreadable data file, bad config or bad command line.
    pub const PARSE: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("{path}: config key `{key}`: {msg}")]
    Config {
        path: PathBuf,
        key: String,
        msg: String,
    },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),

    #[error(transparent)]
    Stats(#[from] overlap_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config { .. } | CliError::Read { .. } => exit::PARSE,
            CliError::Write(_) => exit::FAILURE,
            CliError::Stats(e) if e.is_degenerate_input() => exit::DEGENERATE,
            CliError::Stats(_) => exit::PARSE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
