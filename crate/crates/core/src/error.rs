use thiserror::Error;

/// Errors surfaced by the oracles and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index range mismatch: {0}")]
    IndexRange(String),

    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("measures live on different spaces ({0} vs {1})")]
    SpaceMismatch(u64, u64),

    #[error("weights do not sum to one (sum = {0})")]
    NotNormalized(f64),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("zero ball mass at n = {n}: point outside the effective support")]
    ZeroBallMass { n: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
