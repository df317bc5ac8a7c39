use thiserror::Error;

/// Errors raised by the numerical and combinatorial routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} is limited to {limit}, got {requested}")]
    BudgetExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("domain error in {function}: {reason}")]
    Domain {
        function: &'static str,
        reason: String,
    },

    #[error("series for {function} did not converge within {terms} terms")]
    SeriesNonConvergence { function: &'static str, terms: usize },

    #[error("quadrature did not reach tolerance {tolerance:e}: estimated error {achieved:e} after {intervals} intervals")]
    QuadratureNonConvergence {
        tolerance: f64,
        achieved: f64,
        intervals: usize,
    },

    #[error("eigenvalue {index} did not converge within {iterations} iterations")]
    EigenNonConvergence { index: usize, iterations: usize },

    #[error("Fourier transform methods disagree at y = {y}: |difference| = {difference:e}")]
    MethodDisagreement { y: f64, difference: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
