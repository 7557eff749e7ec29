//! Reference quadrature used as ground truth by every bound engine.
//!
//! * [`integrate_fn`]: adaptive Simpson with a Richardson error estimate. An
//!   endpoint where the integrand cannot be evaluated (or is not finite) is
//!   approached through guard offsets `delta, delta/2, delta/4, ...`, and the
//!   remaining sliver is extrapolated geometrically.
//! * [`integrate_half_line_fn`]: `[0, 1]` followed by doubling panels
//!   `[h, 2h]` until a panel contributes less than `tol / 2`.
//! * [`sum_series`]: partial sums with a geometric or Euler-Maclaurin tail.

mod cumulative;
mod series;

use thiserror::Error;

use crate::convexity::Interval;
use crate::expr::EvalError;
use crate::function::FunctionSpec;
use crate::scalar::CompensatedSum;
use crate::Scalar;

pub use cumulative::CumulativeIntegral;
pub use series::sum_series;

/// Default tolerance on finite intervals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default tolerance on `[0, inf)`.
pub const DEFAULT_HALF_LINE_TOL: f64 = 1e-8;

const MAX_SUBDIVISIONS: usize = 1 << 21;
const MAX_DEPTH: u32 = 300;
const MIN_DEPTH: u32 = 3;
const MAX_GUARD_STEPS: usize = 1100;
const MAX_DOUBLINGS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge after {subdivisions} subdivisions")]
    NonConvergence { subdivisions: usize },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("integral appears divergent (panel contributions stopped decreasing by x = {horizon})")]
    Divergence { horizon: f64 },
    #[error("series terms are not decreasing at index {index}")]
    NotDecreasing { index: u64 },
    #[error("series term {index} is negative")]
    NegativeTerm { index: u64 },
    #[error("series tail bound did not close after {terms} terms")]
    TailNotClosed { terms: u64 },
}

type QResult<T> = Result<T, QuadratureError>;

fn sample<T: Scalar, F>(f: &F, x: T) -> QResult<T>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { at: x.as_f64() })
    }
}

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
}

/// Adaptive Simpson on `[a, b]` with both endpoints evaluable.
fn simpson<T: Scalar, F>(f: &F, a: T, b: T, tol: T) -> QResult<QuadratureResult<T>>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    let half = T::lit(0.5);
    let six = T::lit(6.0);
    let twelve = T::lit(12.0);
    let fifteen = T::lit(15.0);
    let four = T::lit(4.0);
    let floor = T::epsilon() * T::lit(64.0);

    let fa = sample(f, a)?;
    let fb = sample(f, b)?;
    let m = (a + b) * half;
    let fm = sample(f, m)?;
    let mut stack = vec![Panel { a, b, fa, fm, fb, whole: (b - a) / six * (fa + four * fm + fb), tol, depth: 0 }];
    let mut total = CompensatedSum::new();
    let mut err = T::zero();
    let mut subdivisions = 0usize;

    while let Some(p) = stack.pop() {
        subdivisions += 1;
        if subdivisions > MAX_SUBDIVISIONS {
            return Err(QuadratureError::NonConvergence { subdivisions });
        }
        let m = (p.a + p.b) * half;
        let lm = (p.a + m) * half;
        let rm = (m + p.b) * half;
        let flm = sample(f, lm)?;
        let frm = sample(f, rm)?;
        let h = p.b - p.a;
        let left = h / twelve * (p.fa + four * flm + p.fm);
        let right = h / twelve * (p.fm + four * frm + p.fb);
        let both = left + right;
        let delta = both - p.whole;
        let converged = delta.abs() <= fifteen * p.tol || delta.abs() <= floor * (left.abs() + right.abs());
        let exhausted = lm <= p.a || rm >= p.b || lm >= m || rm <= m;
        if (converged && p.depth >= MIN_DEPTH) || exhausted {
            total.add(both + delta / fifteen);
            err = err + delta.abs() / fifteen;
            continue;
        }
        if p.depth >= MAX_DEPTH {
            return Err(QuadratureError::NonConvergence { subdivisions });
        }
        let tol = p.tol * half;
        let depth = p.depth + 1;
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth });
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth });
    }
    Ok(QuadratureResult { value: total.value(), error_estimate: err, subdivisions })
}

fn evaluable<T: Scalar, F>(f: &F, x: T) -> bool
where
    F: Fn(T) -> Result<T, EvalError>,
{
    matches!(f(x), Ok(v) if v.is_finite())
}

/// Integrates the sliver between a singular endpoint and `start`, halving the
/// guard offset until two successive pieces fall below `tol / 8`.
fn guarded_tail<T: Scalar, F>(f: &F, end: T, start: T, tol: T) -> QResult<QuadratureResult<T>>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    let half = T::lit(0.5);
    let small = tol / T::lit(8.0);
    let mut offset = start - end; // signed: positive on the left end
    let mut sum = CompensatedSum::new();
    let mut err = T::zero();
    let mut subdivisions = 0;
    let mut prev: Option<T> = None;
    let mut quiet = 0;
    let mut piece_tol = tol / T::lit(16.0);
    for _ in 0..MAX_GUARD_STEPS {
        let outer = end + offset;
        let inner = end + offset * half;
        if inner == end || inner == outer {
            break;
        }
        let (lo, hi) = if offset > T::zero() { (inner, outer) } else { (outer, inner) };
        let r = simpson(f, lo, hi, piece_tol)?;
        subdivisions += r.subdivisions;
        sum.add(r.value);
        err = err + r.error_estimate;
        piece_tol = piece_tol * half;
        offset = offset * half;
        let piece = r.value;
        quiet = if piece.abs() < small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            // geometric extrapolation of what is left
            let mut tail = T::zero();
            if let Some(p) = prev {
                let ratio = piece / p;
                if ratio > T::zero() && ratio < T::one() {
                    tail = piece * ratio / (T::one() - ratio);
                }
            }
            sum.add(tail);
            err = err + piece.abs();
            return Ok(QuadratureResult { value: sum.value(), error_estimate: err, subdivisions });
        }
        prev = Some(piece);
    }
    Err(QuadratureError::NonConvergence { subdivisions })
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Integrable endpoint singularities are allowed; a failure to evaluate at an
/// interior sample is reported as an error.
pub fn integrate_fn<T: Scalar, F>(f: F, a: T, b: T, tol: T) -> QResult<QuadratureResult<T>>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    if a == b {
        return Ok(QuadratureResult { value: T::zero(), error_estimate: T::zero(), subdivisions: 0 });
    }
    if a > b {
        let r = integrate_fn(f, b, a, tol)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }
    let left_ok = evaluable(&f, a);
    let right_ok = evaluable(&f, b);
    if left_ok && right_ok {
        return simpson(&f, a, b, tol);
    }
    let guard = (b - a) * T::lit(1.0 / 1024.0);
    let lo = if left_ok { a } else { a + guard };
    let hi = if right_ok { b } else { b - guard };
    let quarter = tol * T::lit(0.25);
    let main = simpson(&f, lo, hi, tol * T::lit(0.5))?;
    let mut value = CompensatedSum::new();
    value.add(main.value);
    let mut err = main.error_estimate;
    let mut subdivisions = main.subdivisions;
    if !left_ok {
        let t = guarded_tail(&f, a, lo, quarter)?;
        value.add(t.value);
        err = err + t.error_estimate;
        subdivisions += t.subdivisions;
    }
    if !right_ok {
        let t = guarded_tail(&f, b, hi, quarter)?;
        value.add(t.value);
        err = err + t.error_estimate;
        subdivisions += t.subdivisions;
    }
    Ok(QuadratureResult { value: value.value(), error_estimate: err, subdivisions })
}

/// Integrates `f` over `[0, inf)`.
///
/// The integrand must eventually decrease to zero. The loop stops when a
/// panel contributes less than `tol / 2`, or when the ratio of successive
/// panels has settled enough to sum the remaining panels as a geometric
/// series. Divergence is reported when panel contributions stop decreasing.
pub fn integrate_half_line_fn<T: Scalar, F>(f: F, tol: T) -> QResult<QuadratureResult<T>>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    let half = T::lit(0.5);
    let first = integrate_fn(&f, T::zero(), T::one(), tol * half)?;
    let mut sum = CompensatedSum::new();
    sum.add(first.value);
    let mut err = first.error_estimate;
    let mut subdivisions = first.subdivisions;
    let mut h = T::one();
    let mut panel_tol = tol * T::lit(0.125);
    let mut prev: Option<T> = None;
    let mut prev_ratio: Option<T> = None;
    let mut rising = 0;
    for k in 0..MAX_DOUBLINGS {
        let r = integrate_fn(&f, h, h + h, panel_tol)?;
        sum.add(r.value);
        err = err + r.error_estimate;
        subdivisions += r.subdivisions;
        let piece = r.value;
        if k >= 2 && piece.abs() < tol * half {
            let mut tail = T::zero();
            if let Some(p) = prev {
                let ratio = piece / p;
                if ratio > T::zero() && ratio < T::one() {
                    tail = piece * ratio / (T::one() - ratio);
                }
            }
            sum.add(tail);
            return Ok(QuadratureResult { value: sum.value(), error_estimate: err, subdivisions });
        }
        if let Some(p) = prev {
            // power-law tails: once the panel ratio settles, sum the rest
            let ratio = piece / p;
            if let Some(r0) = prev_ratio {
                if k >= 6 && ratio > T::zero() && ratio < T::one() && r0 > T::zero() {
                    let rest = T::one() - ratio;
                    let spread = piece.abs() * (ratio - r0).abs() / (rest * rest);
                    if spread <= tol * T::lit(0.25) {
                        sum.add(piece * ratio / rest);
                        return Ok(QuadratureResult { value: sum.value(), error_estimate: err + spread, subdivisions });
                    }
                }
            }
            prev_ratio = Some(ratio);
            if k >= 4 && piece.abs() >= p.abs() {
                rising += 1;
                if rising >= 3 {
                    return Err(QuadratureError::Divergence { horizon: (h + h).as_f64() });
                }
            } else {
                rising = 0;
            }
        }
        prev = Some(piece);
        h = h + h;
        panel_tol = panel_tol * half;
    }
    Err(QuadratureError::Divergence { horizon: h.as_f64() })
}

/// Integrates a function spec over `iv`.
pub fn integrate<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, tol: T) -> QResult<QuadratureResult<T>> {
    integrate_fn(|x| f.expression.eval(x), iv.a(), iv.b(), tol)
}

/// Integrates a function spec over `[0, inf)`.
pub fn integrate_half_line<T: Scalar>(f: &FunctionSpec<T>, tol: T) -> QResult<QuadratureResult<T>> {
    integrate_half_line_fn(|x| f.expression.eval(x), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expression;

    fn finite(src: &str, a: f64, b: f64, tol: f64) -> QResult<QuadratureResult<f64>> {
        let e = Expression::parse(src).unwrap();
        integrate_fn(|x| e.eval(x), a, b, tol)
    }

    fn half_line(src: &str, tol: f64) -> QResult<QuadratureResult<f64>> {
        let e = Expression::parse(src).unwrap();
        integrate_half_line_fn(|x| e.eval(x), tol)
    }

    #[test]
    fn polynomial() {
        let r = finite("x^2", 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.error_estimate <= 1e-10);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        assert!((finite("x^2", 1.0, 0.0, 1e-10).unwrap().value + 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(finite("x^2", 1.0, 1.0, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn log_weighted_square() {
        // closed form 7/18 from the moments of ln x and ln(1-x)
        let r = finite("x^2*(ln(1/((1-x)*x))-1)", 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 7.0 / 18.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn endpoint_log_singularity() {
        let r = finite("ln(x)", 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value + 1.0).abs() < 1e-10, "{}", r.value);
        let r = finite("1/sqrt(x)", 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn non_integrable_endpoint_fails() {
        assert!(matches!(finite("1/x", 0.0, 1.0, 1e-10), Err(QuadratureError::NonConvergence { .. })));
    }

    #[test]
    fn interior_singularity_is_an_error() {
        assert!(finite("ln(x)", -1.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn half_line_exponential() {
        let r = half_line("exp(-x)", 1e-8).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        for k in [0.5, 1.0, 2.0] {
            let r = half_line(&format!("exp(-{k}*x)"), 1e-8).unwrap();
            assert!((r.value - 1.0 / k).abs() < 1e-8, "k={k}: {}", r.value);
        }
    }

    #[test]
    fn half_line_frullani() {
        // parts + Frullani: 2 ln 2
        let r = half_line("((1-exp(-x))/x)^2", 1e-8).unwrap();
        assert!((r.value - 2.0 * 2f64.ln()).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn half_line_divergence() {
        assert!(matches!(half_line("1/(1+x)", 1e-8), Err(QuadratureError::Divergence { .. })));
    }

    #[test]
    fn single_precision() {
        let e = Expression::parse("exp(x)").unwrap();
        let r = integrate_fn(|x: f32| e.eval(x), 0.0, 1.0, 1e-6).unwrap();
        assert!((r.value - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
