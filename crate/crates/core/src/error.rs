use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates its invariant. `key` names the field.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    /// A function argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request that cannot be satisfied for the given realization.
    #[error("request error: {0}")]
    Request(String),

    #[error("quadrature did not converge on [{lower}, {upper}]: estimate {estimate}, error {abs_error} after {intervals} subintervals")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        abs_error: f64,
        intervals: usize,
    },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// A bound's parameter precondition does not hold.
    #[error("bound parameter error: {0}")]
    BoundParams(String),

    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn config(key: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            key,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
