use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// A structurally invalid argument (empty grid, order out of range, ...).
    Argument(String),
    /// The integrand returned a non-finite value at a quadrature node.
    Evaluation { node: f64, value: f64 },
    /// Adaptive integration exhausted its subdivision budget.
    Convergence { estimate: f64, error: f64 },
    /// A condition that should be impossible was hit.
    Internal(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Evaluation { node, value } => {
                write!(f, "integrand is not finite at node {node} (value {value})")
            }
            Error::Convergence { estimate, error } => write!(
                f,
                "adaptive quadrature did not converge (estimate {estimate}, error estimate {error})"
            ),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
