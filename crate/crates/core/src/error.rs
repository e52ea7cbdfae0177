use thiserror::Error;

use crate::linalg::SymMatrix;

/// Last iterate carried by a convergence failure.
#[derive(Debug, Clone, PartialEq)]
pub enum LastIterate {
    Matrix(SymMatrix),
    Point(Vec<f64>),
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration cannot be executed (empty grids, bad experiment files).
    #[error("config error: {0}")]
    Config(String),

    /// A numeric routine produced a non-finite value or failed internally.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("{routine} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        routine: &'static str,
        iterations: usize,
        residual: f64,
        last: Box<LastIterate>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Convergence { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
