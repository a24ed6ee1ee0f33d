use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports. Each variant names the violated
/// invariant so the CLI can surface it verbatim and map it to an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: argument {value} outside {expected}")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("validation failed: {invariant} ({detail})")]
    Validation {
        invariant: &'static str,
        detail: String,
    },

    #[error("loading is not self-balanced on component {component}: residual {residual:e} exceeds {tolerance:e}")]
    UnbalancedLoading {
        component: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("unsupported parameter regime: {0}")]
    UnsupportedRegime(String),

    #[error("discrete system is singular or ill-conditioned: {0}")]
    Singular(String),

    #[error("iteration did not converge: {method} stopped after {iterations} iterations at residual {residual:e}")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            invariant,
            detail: detail.into(),
        }
    }
}
