use thiserror::Error;

use crate::arith::ArithError;

/// Failure to evaluate a summand, closed form, certificate or expression at
/// a point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("exponent must be an integer, got {0}")]
    NonIntegerExponent(String),
    #[error("{func}: argument must be a non-negative integer, got {value}")]
    InvalidArgument { func: &'static str, value: String },
    #[error("index {index} outside domain {lo}..={hi}")]
    OutOfDomain { index: i64, lo: i64, hi: i64 },
}

impl EvalError {
    /// A zero denominator: the point is outside the identity's admissible set
    /// and should be resampled rather than counted as a failure.
    pub fn is_inadmissible(&self) -> bool {
        matches!(self, EvalError::Arith(ArithError::DivisionByZero))
    }
}
