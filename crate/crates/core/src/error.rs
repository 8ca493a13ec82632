use thiserror::Error;

/// Errors raised by the analysis, simulation and optimization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function or type.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed (non-convergence, out-of-range result).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The constrained problem has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
