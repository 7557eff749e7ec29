//! Bounds that need convexity of `f'` or `f''`, plus the log-mean inequality.
//!
//! Endpoint derivatives come from Taylor jets, so they are exact up to
//! rounding.

use crate::convexity::{find_split, validate_split, Interval};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::hh::{convex_hypothesis, oracle_integral, oracle_mean};
use crate::{Scalar, Settings};

/// A quantity bracketed by a bound. One-sided theorems leave `lower` empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport<T> {
    pub lower: Option<T>,
    pub value: T,
    pub upper: T,
}

impl<T: Scalar> GapReport<T> {
    pub fn slack_lower(&self) -> Option<T> {
        self.lower.map(|l| self.value - l)
    }

    pub fn slack_upper(&self) -> T {
        self.upper - self.value
    }

    pub fn holds(&self, tol: T) -> bool {
        self.slack_upper() >= -tol && self.slack_lower().is_none_or(|s| s >= -tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitPoint<T> {
    /// Locate the split with [`find_split`].
    Auto,
    /// Use this point after validating it.
    At(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflectionBound<T> {
    pub c: T,
    pub report: GapReport<T>,
}

fn derivs<T: Scalar>(f: &FunctionSpec<T>, x: T, order: usize) -> Result<[T; 3]> {
    let j = f.expression.jet(x, order)?;
    let d = |k| j.derivative(k).unwrap_or_else(T::zero);
    Ok([d(0), d(1), d(2)])
}

/// For `f'` concave on `[a, c]` and convex on `[c, b]`:
/// `((c-a) f(a) + (b-c) f(b)) / (b-a) - mean <=
/// (1/3) [ (b-c)^2 f'(b)/(b-a) - (c-a)^2 f'(a)/(b-a) + ((a+b)/2 - c) f'(c) ]`.
pub fn inflection_hadamard<T: Scalar>(
    f: &FunctionSpec<T>,
    iv: &Interval<T>,
    split: SplitPoint<T>,
    s: &Settings<T>,
) -> Result<InflectionBound<T>> {
    let c = match split {
        SplitPoint::Auto => find_split(&f.expression, iv, s.grid, s.certify_tol)?,
        SplitPoint::At(c) => {
            validate_split(&f.expression, iv, c, s.grid, s.certify_tol)?;
            c
        }
    };
    let (a, b, w) = (iv.a(), iv.b(), iv.width());
    let [fa, da, _] = derivs(f, a, 1)?;
    let [fb, db, _] = derivs(f, b, 1)?;
    let [_, dc, _] = derivs(f, c, 1)?;
    let value = ((c - a) * fa + (b - c) * fb) / w - oracle_mean(f, iv, s)?;
    let bound = ((b - c) * (b - c) / w * db - (c - a) * (c - a) / w * da + (iv.midpoint() - c) * dc) / T::lit(3.0);
    Ok(InflectionBound { c, report: GapReport { lower: None, value, upper: bound } })
}

/// First moment about the centre, `int (x - (a+b)/2) f`, for convex `f'`.
pub fn moment_enclosure<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, s: &Settings<T>) -> Result<GapReport<T>> {
    convex_hypothesis(f, 1, iv, s)?;
    let (a, b, w) = (iv.a(), iv.b(), iv.width());
    let [fa, da, _] = derivs(f, a, 1)?;
    let [fb, db, _] = derivs(f, b, 1)?;
    let m = iv.midpoint();
    let moment = crate::quadrature::integrate_fn(|x| Ok((x - m) * f.expression.eval(x)?), a, b, s.quad_tol)?.value;
    let w2 = w * w;
    let w3 = w2 * w;
    let lower = w2 / T::lit(8.0) * (fb - fa) - w3 / T::lit(48.0) * (da + db);
    let upper = w3 / T::lit(24.0) * (da + db);
    Ok(GapReport { lower: Some(lower), value: moment, upper })
}

/// Trapezoid gap `(f(a)+f(b))/2 - mean` for convex `f''`.
pub fn trapezoid_gap_enclosure<T: Scalar>(
    f: &FunctionSpec<T>,
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<GapReport<T>> {
    convex_hypothesis(f, 2, iv, s)?;
    let (a, b, w) = (iv.a(), iv.b(), iv.width());
    let [fa, da, sa] = derivs(f, a, 2)?;
    let [fb, db, sb] = derivs(f, b, 2)?;
    let value = (fa + fb) * T::lit(0.5) - oracle_mean(f, iv, s)?;
    let lower = w / T::lit(8.0) * (db - da) - w * w / T::lit(48.0) * (sa + sb);
    let upper = w * w / T::lit(24.0) * (sa + sb);
    Ok(GapReport { lower: Some(lower), value, upper })
}

/// Mean of `f` between endpoint-derivative bounds, for convex `f'`.
pub fn mean_enclosure_endpoint<T: Scalar>(
    f: &FunctionSpec<T>,
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<GapReport<T>> {
    convex_hypothesis(f, 1, iv, s)?;
    let (a, b, w) = (iv.a(), iv.b(), iv.width());
    let [fa, da, _] = derivs(f, a, 1)?;
    let [fb, db, _] = derivs(f, b, 1)?;
    let third = T::lit(3.0);
    let sixth = T::lit(6.0);
    let lower = (fa + fb + fb) / third - db * w / sixth;
    let upper = (fb + fa + fa) / third + da * w / sixth;
    Ok(GapReport { lower: Some(lower), value: oracle_mean(f, iv, s)?, upper })
}

/// Mean of `f` between bounds built from the two half-interval integrals, for
/// convex `f'`.
pub fn mean_enclosure_midpoint<T: Scalar>(
    f: &FunctionSpec<T>,
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<GapReport<T>> {
    convex_hypothesis(f, 1, iv, s)?;
    let (a, b, m, w) = (iv.a(), iv.b(), iv.midpoint(), iv.width());
    let left = oracle_integral(f, a, m, s)?;
    let right = oracle_integral(f, m, b, s)?;
    let fm2 = f.eval(m)? * T::lit(2.0);
    let four = T::lit(4.0) / w;
    let lower = f.eval(a)? + fm2 - four * left;
    let upper = f.eval(b)? + fm2 - four * right;
    Ok(GapReport { lower: Some(lower), value: oracle_mean(f, iv, s)?, upper })
}

/// `int_m^b f - int_a^m f <= (b-a)(f(b)-f(a))/4` for convex `f'`.
pub fn half_interval_gap<T: Scalar>(f: &FunctionSpec<T>, iv: &Interval<T>, s: &Settings<T>) -> Result<GapReport<T>> {
    convex_hypothesis(f, 1, iv, s)?;
    let (a, b, m) = (iv.a(), iv.b(), iv.midpoint());
    let value = oracle_integral(f, m, b, s)? - oracle_integral(f, a, m, s)?;
    let upper = iv.width() * (f.eval(b)? - f.eval(a)?) * T::lit(0.25);
    Ok(GapReport { lower: None, value, upper })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMean<T> {
    /// `a^((3a+b)/(4(a+b))) b^((a+3b)/(4(a+b)))`
    pub lhs: T,
    /// `(a+b)/2`
    pub mid: T,
    /// `((3a+b) a + (a+3b) b) / (4(a+b))`
    pub amgm: T,
}

/// Weighted geometric mean, arithmetic mean and weighted arithmetic mean of
/// `0 < a <= b`. For `a = b` all three equal `a`.
pub fn log_mean_bound<T: Scalar>(a: T, b: T) -> Result<LogMean<T>> {
    if !(a > T::zero() && b.is_finite()) {
        return Err(Error::Parameter(format!("a must be positive, got {}", a.as_f64())));
    }
    if !(a <= b) {
        return Err(Error::Parameter(format!("need a <= b, got a = {}, b = {}", a.as_f64(), b.as_f64())));
    }
    let three = T::lit(3.0);
    let denom = T::lit(4.0) * (a + b);
    let alpha = (three * a + b) / denom;
    let beta = (a + three * b) / denom;
    Ok(LogMean {
        lhs: a.powf(alpha) * b.powf(beta),
        mid: (a + b) * T::lit(0.5),
        amgm: alpha * a + beta * b,
    })
}
