use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A threshold search ran past the configured ceiling.
    #[error("threshold {name} exceeds the search ceiling {ceiling}")]
    InfeasibleThreshold { name: &'static str, ceiling: u64 },

    #[error("kernel truncation needs more than {cap} coefficients")]
    TruncationCap { cap: usize },

    #[error("grid of {nodes} nodes is unusable: {reason}")]
    GridSize { nodes: usize, reason: String },

    /// Quadrature did not settle when the grid was refined.
    #[error("non-converged quadrature: {0}")]
    NonConverged(String),

    /// The request lies outside the regime in which the estimate holds.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// The operation is not defined for this parameter combination.
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
