use crate::convexity::Interval;
use crate::error::Result;
use crate::expr::Expression;
use crate::Scalar;

/// Where a function is considered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain<T> {
    Finite(Interval<T>),
    /// `[0, inf)`
    HalfLine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Literal,
    Generated { seed: u64, index: u64, class: &'static str },
}

/// An expression together with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec<T> {
    pub expression: Expression,
    pub domain: Domain<T>,
    pub provenance: Provenance,
}

impl<T: Scalar> FunctionSpec<T> {
    pub fn new(expression: Expression, domain: Domain<T>) -> Self {
        FunctionSpec { expression, domain, provenance: Provenance::Literal }
    }

    /// Parses `source` as a function on `[a, b]`.
    pub fn on_interval(source: &str, a: T, b: T) -> Result<Self> {
        Ok(Self::new(Expression::parse(source)?, Domain::Finite(Interval::new(a, b)?)))
    }

    /// Parses `source` as a function on `[0, inf)`.
    pub fn on_half_line(source: &str) -> Result<Self> {
        Ok(Self::new(Expression::parse(source)?, Domain::HalfLine))
    }

    /// The finite interval, if the domain has one.
    pub fn interval(&self) -> Option<Interval<T>> {
        match self.domain {
            Domain::Finite(iv) => Some(iv),
            Domain::HalfLine => None,
        }
    }

    pub fn eval(&self, x: T) -> Result<T> {
        Ok(self.expression.eval(x)?)
    }

    pub fn text(&self) -> &str {
        self.expression.source_text()
    }
}
