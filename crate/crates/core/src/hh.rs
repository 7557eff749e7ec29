//! Hermite-Hadamard bounds for convex `f` and their refinements.
//!
//! Unless an operation says otherwise, [`Enclosure::value`] is the oracle
//! integral mean `(1/(b-a)) int_a^b f`.

use crate::convexity::{require_convex, ConvexityCertificate, Interval};
use crate::error::{Error, Result};
use crate::expr::{DomainKind, EvalError};
use crate::function::FunctionSpec;
use crate::quadrature::{integrate_fn, integrate_half_line, sum_series};
use crate::scalar::CompensatedSum;
use crate::{Scalar, Settings};

/// A certified ordering `lower <= value <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure<T> {
    pub lower: T,
    pub value: T,
    pub upper: T,
}

impl<T: Scalar> Enclosure<T> {
    pub fn new(lower: T, value: T, upper: T) -> Self {
        Enclosure { lower, value, upper }
    }

    pub fn slack_lower(&self) -> T {
        self.value - self.lower
    }

    pub fn slack_upper(&self) -> T {
        self.upper - self.value
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    /// Both slacks are at least `-tol`.
    pub fn holds(&self, tol: T) -> bool {
        self.slack_lower() >= -tol && self.slack_upper() >= -tol
    }

    /// `[lower, upper]` lies inside `other`'s bounds.
    pub fn within(&self, other: &Enclosure<T>) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }
}

/// One-sided comparison `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> Comparison<T> {
    pub fn slack(&self) -> T {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol: T) -> bool {
        self.slack() >= -tol
    }
}

pub(crate) fn convex_hypothesis<T: Scalar>(
    f: &FunctionSpec<T>,
    level: usize,
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<ConvexityCertificate<T>> {
    require_convex(&f.expression, level, iv, s.grid, s.certify_tol)
}

pub(crate) fn oracle_integral<T: Scalar>(f: &FunctionSpec<T>, a: T, b: T, s: &Settings<T>) -> Result<T> {
    Ok(integrate_fn(|x| f.expression.eval(x), a, b, s.quad_tol)?.value)
}

pub(crate) fn oracle_mean<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, s: &Settings<T>) -> Result<T> {
    Ok(oracle_integral(f, iv.a(), iv.b(), s)? / iv.width())
}

/// `f((a+b)/2) <= mean <= (f(a)+f(b))/2`. For affine `f` all three agree.
pub fn hh<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, s: &Settings<T>) -> Result<Enclosure<T>> {
    convex_hypothesis(f, 0, iv, s)?;
    let lower = f.eval(iv.midpoint())?;
    let upper = (f.eval(iv.a())? + f.eval(iv.b())?) * T::lit(0.5);
    Ok(Enclosure::new(lower, oracle_mean(f, iv, s)?, upper))
}

/// `f(a) + f(b) - f(a+b-x) - f(x)`, non-negative for convex `f`.
///
/// Convexity is not re-certified here; callers check it once per function.
pub fn reflection_gap<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, x: T) -> Result<T> {
    if !iv.contains(x) {
        return Err(Error::InvalidArgument(format!(
            "x = {} outside [{}, {}]",
            x.as_f64(),
            iv.a().as_f64(),
            iv.b().as_f64()
        )));
    }
    let (a, b) = (iv.a(), iv.b());
    Ok(f.eval(a)? + f.eval(b)? - f.eval(a + b - x)? - f.eval(x)?)
}

/// Riemann-sum sandwich with nodes `x_k = a + k (b-a)/n`, `k = 1..n`.
///
/// `value` is the sum `(1/n) sum f(x_k)`, not the oracle mean.
pub fn riemann_sandwich<T: Scalar>(
    f: &FunctionSpec<T>,
    iv: &Interval<T>,
    n: usize,
    s: &Settings<T>,
) -> Result<Enclosure<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    convex_hypothesis(f, 0, iv, s)?;
    let (a, b) = (iv.a(), iv.b());
    let nn = T::from_count(n);
    let inv = T::one() / nn;
    let mut sum = CompensatedSum::new();
    for k in 1..=n {
        let x = if k == n { b } else { a + T::from_count(k) * iv.width() / nn };
        sum.add(f.eval(x)?);
    }
    let half = T::lit(0.5);
    let lower = f.eval(((T::one() - inv) * a + (T::one() + inv) * b) * half)?;
    let upper = (f.eval(a)? * (T::one() - inv) + f.eval(b)? * (T::one() + inv)) * half;
    Ok(Enclosure::new(lower, sum.value() * inv, upper))
}

/// Log-weighted refinement of the right-hand inequality.
///
/// `lower` is the oracle mean, `value` is
/// `(1/(b-a)) int f(x) [ln((b-a)^2 / ((b-x)(x-a))) - 1] dx` and `upper` is the
/// endpoint average.
pub fn refined_rhh<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, s: &Settings<T>) -> Result<Enclosure<T>> {
    convex_hypothesis(f, 0, iv, s)?;
    let (a, b, w) = (iv.a(), iv.b(), iv.width());
    // x = a + w u and x = b - w u fold both log singularities onto u = 0,
    // where u carries full relative precision
    let folded = |u: T| -> Result<T, EvalError> {
        if !(u > T::zero()) {
            return Err(EvalError::Domain { kind: DomainKind::LogOfNonPositive, at: u.as_f64() });
        }
        let weight = -u.ln() - (T::one() - u).ln() - T::one();
        Ok((f.expression.eval(a + w * u)? + f.expression.eval(b - w * u)?) * weight)
    };
    let value = integrate_fn(folded, T::zero(), T::lit(0.5), s.quad_tol)?.value;
    let upper = (f.eval(a)? + f.eval(b)?) * T::lit(0.5);
    Ok(Enclosure::new(oracle_mean(f, iv, s)?, value, upper))
}

/// Weighted upper bound `int f g <= ((f(a)+f(b))/2) int g` for a non-negative
/// weight `g` symmetric about the midpoint.
///
/// Symmetry and sign of `g` are checked on the evidence grid to within `tol`.
pub fn fejer_upper<T: Scalar>(
    f: &FunctionSpec<T>,
    g: &FunctionSpec<T>,
    iv: &Interval<T>,
    tol: T,
    s: &Settings<T>,
) -> Result<Comparison<T>> {
    convex_hypothesis(f, 0, iv, s)?;
    let (a, b) = (iv.a(), iv.b());
    for x in iv.linspace(s.grid - 1) {
        let gx = g.eval(x)?;
        if gx < -tol {
            return Err(Error::NegativeWeight { at: x.as_f64() });
        }
        let defect = (g.eval(a + b - x)? - gx).abs();
        if defect > tol {
            return Err(Error::SymmetryViolated { at: x.as_f64(), defect: defect.as_f64() });
        }
    }
    let product = |x: T| Ok(f.expression.eval(x)? * g.expression.eval(x)?);
    let lhs = integrate_fn(product, a, b, s.quad_tol)?.value;
    let weight = oracle_integral(g, a, b, s)?;
    let rhs = (f.eval(a)? + f.eval(b)?) * T::lit(0.5) * weight;
    Ok(Comparison { lhs, rhs })
}

/// Midpoint and trapezoid means over `2^depth` equal leaves: `(lower, upper)`.
pub fn composite_level<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, depth: u32) -> Result<(T, T)> {
    let leaves = 1usize << depth;
    let n = T::from_count(leaves);
    let h = iv.width() / n;
    let half = T::lit(0.5);
    let mut mids = CompensatedSum::new();
    let mut traps = CompensatedSum::new();
    let mut left = f.eval(iv.a())?;
    for i in 0..leaves {
        let l = iv.a() + h * T::from_count(i);
        let r = if i + 1 == leaves { iv.b() } else { l + h };
        let fr = f.eval(r)?;
        mids.add(f.eval((l + r) * half)?);
        traps.add((left + fr) * half);
        left = fr;
    }
    Ok((mids.value() / n, traps.value() / n))
}

/// Applies the sandwich on a uniform bisection tree, deepening until
/// `upper - lower <= target_gap`.
pub fn composite_hh<T: Scalar>(
    f: &FunctionSpec<T>,
    iv: &Interval<T>,
    target_gap: T,
    max_depth: u32,
    s: &Settings<T>,
) -> Result<Enclosure<T>> {
    convex_hypothesis(f, 0, iv, s)?;
    let mut gap = T::infinity();
    for depth in 0..=max_depth {
        let (lower, upper) = composite_level(f, iv, depth)?;
        gap = upper - lower;
        if gap <= target_gap {
            return Ok(Enclosure::new(lower, oracle_mean(f, iv, s)?, upper));
        }
    }
    Err(Error::TargetNotReached { achieved: gap.as_f64(), depth: max_depth as usize })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesVariant {
    /// `sum f(k - 1/2) <= int_0^inf f <= f(0)/2 + sum f(k)`
    Hadamard,
    /// `sum f(k) <= int_0^inf f <= f(0) + sum f(k)`
    Monotone,
}

/// Both series enclosures of `int_0^inf f`, sharing one set of sums:
/// `(hadamard, monotone)`.
///
/// `f` must be positive, convex and decreasing; convexity and positivity are
/// certified on `[0, s.window]`, monotonicity on the integer samples.
pub fn series_sandwiches<T: Scalar>(f: &FunctionSpec<T>, s: &Settings<T>) -> Result<(Enclosure<T>, Enclosure<T>)> {
    let window = Interval::new(T::zero(), s.window)?;
    convex_hypothesis(f, 0, &window, s)?;
    for x in window.linspace(s.grid - 1) {
        if !(f.eval(x)? > T::zero()) {
            return Err(Error::Positivity { index: 0, at: x.as_f64(), requirement: "positive" });
        }
    }
    let whole = sum_series(f, T::zero(), s.series_tol)?;
    let shifted = sum_series(f, T::lit(0.5), s.series_tol)?;
    let f0 = f.eval(T::zero())?;
    let value = integrate_half_line(f, s.half_line_tol)?.value;
    Ok((
        Enclosure::new(shifted, value, f0 * T::lit(0.5) + whole),
        Enclosure::new(whole, value, f0 + whole),
    ))
}

/// One of the two series enclosures of `int_0^inf f`.
pub fn series_sandwich<T: Scalar>(f: &FunctionSpec<T>, variant: SeriesVariant, s: &Settings<T>) -> Result<Enclosure<T>> {
    let (hadamard, monotone) = series_sandwiches(f, s)?;
    Ok(match variant {
        SeriesVariant::Hadamard => hadamard,
        SeriesVariant::Monotone => monotone,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::Verdict;

    const E: f64 = std::f64::consts::E;

    fn on(src: &str, a: f64, b: f64) -> (FunctionSpec<f64>, Interval<f64>) {
        let f = FunctionSpec::on_interval(src, a, b).unwrap();
        let iv = f.interval().unwrap();
        (f, iv)
    }

    fn close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    fn s() -> Settings<f64> {
        Settings::default()
    }

    #[test]
    fn hh_square() {
        let (f, iv) = on("x^2", 0.0, 1.0);
        let e = hh(&f, &iv, &s()).unwrap();
        close(e.lower, 0.25, 0.0);
        close(e.value, 1.0 / 3.0, 1e-10);
        close(e.upper, 0.5, 0.0);
    }

    #[test]
    fn hh_exponential() {
        let (f, iv) = on("exp(x)", 0.0, 1.0);
        let e = hh(&f, &iv, &s()).unwrap();
        close(e.lower, E.sqrt(), 1e-15);
        close(e.value, E - 1.0, 1e-10);
        close(e.upper, (1.0 + E) / 2.0, 1e-15);
    }

    #[test]
    fn hh_affine_equality() {
        let (f, iv) = on("2*x+1", 0.0, 1.0);
        let e = hh(&f, &iv, &s()).unwrap();
        close(e.lower, 2.0, 1e-12);
        close(e.value, 2.0, 1e-10);
        close(e.upper, 2.0, 1e-12);
    }

    #[test]
    fn hh_rejects_nonconvex() {
        let (f, iv) = on("x^2*(2-x)^2", 0.0, 2.0);
        assert_eq!(hh(&f, &iv, &s()), Err(Error::ConvexityNotCertified { level: 0, verdict: Verdict::Neither }));
        let (f, iv) = on("-x^2", 0.0, 1.0);
        assert!(matches!(hh(&f, &iv, &s()), Err(Error::ConvexityNotCertified { .. })));
    }

    #[test]
    fn reflection() {
        let (f, iv) = on("x^2", 0.0, 1.0);
        close(reflection_gap(&f, &iv, 0.25).unwrap(), 0.375, 1e-15);
        assert_eq!(reflection_gap(&f, &iv, 0.0).unwrap(), 0.0);
        assert!(reflection_gap(&f, &iv, 1.5).is_err());
        let (g, iv) = on("3*x-2", -1.0, 2.0);
        for x in [-1.0, -0.3, 0.5, 1.7] {
            close(reflection_gap(&g, &iv, x).unwrap(), 0.0, 1e-14);
        }
    }

    #[test]
    fn riemann() {
        let (f, iv) = on("x^2", 0.0, 1.0);
        let e = riemann_sandwich(&f, &iv, 2, &s()).unwrap();
        close(e.lower, 0.5625, 1e-15);
        close(e.value, 0.625, 1e-15);
        close(e.upper, 0.75, 1e-15);
        let e = riemann_sandwich(&f, &iv, 1, &s()).unwrap();
        assert_eq!((e.lower, e.value, e.upper), (1.0, 1.0, 1.0));
        assert!(riemann_sandwich(&f, &iv, 0, &s()).is_err());
        // large n approaches the integral mean
        let (g, iv) = on("exp(x)", 0.0, 1.0);
        let e = riemann_sandwich(&g, &iv, 10_000, &s()).unwrap();
        close(e.value, E - 1.0, 1e-3);
        assert!(e.holds(0.0));
    }

    #[test]
    fn refined_square() {
        let (f, iv) = on("x^2", 0.0, 1.0);
        let e = refined_rhh(&f, &iv, &s()).unwrap();
        close(e.lower, 1.0 / 3.0, 1e-10);
        close(e.value, 7.0 / 18.0, 1e-9);
        close(e.upper, 0.5, 0.0);
    }

    #[test]
    fn refined_identity_is_tight() {
        let (f, iv) = on("x", 0.0, 1.0);
        let e = refined_rhh(&f, &iv, &s()).unwrap();
        close(e.lower, 0.5, 1e-10);
        close(e.value, 0.5, 1e-9);
        close(e.upper, 0.5, 0.0);
    }

    #[test]
    fn refined_exponential_ordering() {
        let (f, iv) = on("exp(x)", 0.0, 1.0);
        let e = refined_rhh(&f, &iv, &s()).unwrap();
        assert!(e.holds(1e-9));
        // mpmath: 1.765002538322295
        close(e.value, 1.765_002_538_322_295, 1e-9);
    }

    #[test]
    fn fejer() {
        let (f, iv) = on("x^2", 0.0, 1.0);
        let one = FunctionSpec::on_interval("1", 0.0, 1.0).unwrap();
        let c = fejer_upper(&f, &one, &iv, 1e-12, &s()).unwrap();
        close(c.lhs, 1.0 / 3.0, 1e-10);
        close(c.rhs, 0.5, 1e-10);
        let bump = FunctionSpec::on_interval("x*(1-x)", 0.0, 1.0).unwrap();
        let c = fejer_upper(&f, &bump, &iv, 1e-12, &s()).unwrap();
        close(c.lhs, 1.0 / 20.0, 1e-10);
        close(c.rhs, 1.0 / 12.0, 1e-10);
        let ramp = FunctionSpec::on_interval("x", 0.0, 1.0).unwrap();
        assert!(matches!(fejer_upper(&f, &ramp, &iv, 1e-12, &s()), Err(Error::SymmetryViolated { .. })));
        let neg = FunctionSpec::on_interval("x*(x-1)", 0.0, 1.0).unwrap();
        assert!(matches!(fejer_upper(&f, &neg, &iv, 1e-12, &s()), Err(Error::NegativeWeight { .. })));
    }

    #[test]
    fn composite_levels() {
        let (f, iv) = on("x^2", 0.0, 1.0);
        let (lo, up) = composite_level(&f, &iv, 0).unwrap();
        close(up - lo, 0.25, 1e-15);
        let (lo, up) = composite_level(&f, &iv, 1).unwrap();
        close(lo, 0.3125, 1e-15);
        close(up, 0.375, 1e-15);
        close(up - lo, 0.0625, 1e-15);
    }

    #[test]
    fn composite_target() {
        let (f, iv) = on("2*x+1", 0.0, 1.0);
        let e = composite_hh(&f, &iv, 0.0, 0, &s()).unwrap();
        assert!(e.width().abs() < 1e-15);
        let (g, iv) = on("exp(x)", 0.0, 1.0);
        let e = composite_hh(&g, &iv, 1e-6, 20, &s()).unwrap();
        assert!(e.width() <= 1e-6);
        assert!(e.lower <= E - 1.0 && E - 1.0 <= e.upper);
        assert!(matches!(
            composite_hh(&g, &iv, 1e-12, 3, &s()),
            Err(Error::TargetNotReached { depth: 3, .. })
        ));
    }

    #[test]
    fn series_exponential() {
        let f = FunctionSpec::on_half_line("exp(-x)").unwrap();
        let (h, m) = series_sandwiches(&f, &s()).unwrap();
        close(h.lower, E.sqrt() / (E - 1.0), 1e-12);
        close(h.value, 1.0, 1e-9);
        close(h.upper, 0.5 + 1.0 / (E - 1.0), 1e-12);
        close(m.lower, 1.0 / (E - 1.0), 1e-12);
        close(m.upper, 1.0 + 1.0 / (E - 1.0), 1e-12);
        assert!(h.within(&m));
        assert_eq!(series_sandwich(&f, SeriesVariant::Monotone, &s()).unwrap(), m);
    }

    #[test]
    fn series_inverse_square() {
        let pi2 = std::f64::consts::PI.powi(2);
        let f = FunctionSpec::on_half_line("1/(1+x)^2").unwrap();
        let h = series_sandwich(&f, SeriesVariant::Hadamard, &s()).unwrap();
        close(h.lower, pi2 / 2.0 - 4.0, 1e-10);
        close(h.value, 1.0, 1e-8);
        close(h.upper, 0.5 + pi2 / 6.0 - 1.0, 1e-10);
    }

    #[test]
    fn series_rejects_non_decreasing_or_nonpositive() {
        let f = FunctionSpec::on_half_line("exp(x)").unwrap();
        assert!(series_sandwiches(&f, &s()).is_err());
        let g = FunctionSpec::on_half_line("(x-3)^2").unwrap();
        assert!(series_sandwiches(&g, &s()).is_err());
    }
}
