use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A critical-value ladder violates `A_1 <= .. <= A_K < B_K <= .. <= B_1`.
    #[error("invalid ladder: {0}")]
    Ladder(String),

    /// A caller passed arguments that do not fit the current state.
    #[error("usage error: {0}")]
    Usage(String),

    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed (non-convergence, non-positive-definite matrix, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A statistic supplier ran out of data while its stream was still active.
    #[error("stream underrun: stream {stream} exhausted at n={n} before a decision was reached")]
    StreamUnderrun { stream: usize, n: u64 },

    /// The sampling schedule ended with hypotheses still active.
    #[error("schedule exhausted at n={n} with {active} active stream(s)")]
    ScheduleExhausted { n: u64, active: usize },

    /// Reading input or writing output failed.
    #[error("i/o error: {0}")]
    Io(String),

    /// Experiment or hypothesis configuration failed validation.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            Error::StreamUnderrun { .. } | Error::ScheduleExhausted { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
