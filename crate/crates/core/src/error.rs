use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid numeric input (non-finite time, bad kernel parameter, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration or out-of-range model size.
    #[error("config error: {0}")]
    Config(String),

    /// NaN, divergence or another failure of a numerical run.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Dimension { .. } => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) => 2,
        }
    }
}
