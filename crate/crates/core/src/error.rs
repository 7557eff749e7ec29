use thiserror::Error;

use crate::convexity::Verdict;
use crate::expr::{EvalError, ParseError};
use crate::quadrature::QuadratureError;

/// Errors returned by the bound engines.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("convexity not certified at derivative level {level}: verdict {verdict:?}")]
    ConvexityNotCertified { level: usize, verdict: Verdict },
    #[error("no concave-then-convex split point for f' on the interval")]
    NoSuchSplit,
    #[error("split point c = {c} not certified: {reason}")]
    SplitNotCertified { c: f64, reason: String },
    #[error("weight is not symmetric about the midpoint: |g(a+b-x) - g(x)| = {defect} at x = {at}")]
    SymmetryViolated { at: f64, defect: f64 },
    #[error("weight is negative at x = {at}")]
    NegativeWeight { at: f64 },
    #[error("function #{index} is not {requirement} at x = {at}")]
    Positivity { index: usize, at: f64, requirement: &'static str },
    #[error("composite refinement reached depth {depth} with gap {achieved}, above the target")]
    TargetNotReached { achieved: f64, depth: usize },
    #[error("parameter constraint violated: {0}")]
    Parameter(String),
}

impl Error {
    /// True for failures of a mathematical hypothesis (as opposed to malformed
    /// input such as a syntax error).
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Parse(_) | Error::InvalidInterval { .. } | Error::InvalidArgument(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
