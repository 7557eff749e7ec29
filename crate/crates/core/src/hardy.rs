//! Norm-ratio and product bounds built on the Hermite-Hadamard sandwich.

use crate::convexity::{certify, ConvexityCertificate, Interval};
use crate::error::{Error, Result};
use crate::expr::{DomainKind, EvalError, Expression};
use crate::function::FunctionSpec;
use crate::hh::{convex_hypothesis, Comparison, Enclosure};
use crate::quadrature::{integrate_fn, integrate_half_line_fn, CumulativeIntegral};
use crate::{Scalar, Settings};

/// Exponents of the weighted Hardy ratio, with `p > 1` and `alpha p > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyParams<T> {
    alpha: T,
    p: T,
}

impl<T: Scalar> HardyParams<T> {
    pub fn new(alpha: T, p: T) -> Result<Self> {
        if !(p > T::one() && p.is_finite()) {
            return Err(Error::Parameter(format!("p must satisfy 1 < p < inf, got {}", p.as_f64())));
        }
        if !(alpha * p > T::one() && alpha.is_finite()) {
            return Err(Error::Parameter(format!(
                "alpha * p must exceed 1, got {}",
                (alpha * p).as_f64()
            )));
        }
        Ok(HardyParams { alpha, p })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// `2^(1 - alpha + 1/p)`
    pub fn lower(&self) -> T {
        T::lit(2.0).powf(T::one() - self.alpha + self.p.recip())
    }

    /// `1 / (alpha - 1/p)`
    pub fn upper(&self) -> T {
        (self.alpha - self.p.recip()).recip()
    }
}

fn positive_on<T: Scalar>(f: &FunctionSpec<T>, index: usize, iv: &Interval<T>, s: &Settings<T>) -> Result<()> {
    for x in iv.linspace(s.grid - 1) {
        if !(f.eval(x)? > T::zero()) {
            return Err(Error::Positivity { index, at: x.as_f64(), requirement: "positive" });
        }
    }
    Ok(())
}

fn nonnegative_on<T: Scalar>(f: &FunctionSpec<T>, index: usize, iv: &Interval<T>, s: &Settings<T>) -> Result<()> {
    for x in iv.linspace(s.grid - 1) {
        if !(f.eval(x)? >= T::zero()) {
            return Err(Error::Positivity { index, at: x.as_f64(), requirement: "non-negative" });
        }
    }
    Ok(())
}

/// Half-line integral to a relative tolerance: a coarse pass fixes the scale.
fn half_line_relative<T: Scalar, F>(g: F, coarse: T, rel: T) -> Result<T>
where
    F: Fn(T) -> Result<T, EvalError>,
{
    let scale = integrate_half_line_fn(&g, coarse)?.value.abs();
    if scale == T::zero() {
        return Ok(T::zero());
    }
    Ok(integrate_half_line_fn(&g, (rel * scale).min(coarse))?.value)
}

/// `||x^-alpha int_0^x f||_p / ||x^(1-alpha) f||_p` enclosed by
/// `[2^(1-alpha+1/p), 1/(alpha-1/p)]`.
///
/// Convexity and positivity are certified on `[0, s.window]` only. `tol` is
/// the target accuracy of the ratio.
pub fn hardy_ratio<T: Scalar>(
    f: &FunctionSpec<T>,
    params: &HardyParams<T>,
    tol: T,
    s: &Settings<T>,
) -> Result<Enclosure<T>> {
    let window = Interval::new(T::zero(), s.window)?;
    convex_hypothesis(f, 0, &window, s)?;
    positive_on(f, 0, &window, s)?;
    let (alpha, p) = (params.alpha, params.p);
    let rel = (tol * p * T::lit(0.25)).max(T::lit(1e-13));
    let inner_tol = (s.quad_tol * T::lit(1e-2)).max(T::epsilon() * T::lit(16.0));
    let big_f = CumulativeIntegral::new(|x| f.expression.eval(x), inner_tol)?;
    let numerator = half_line_relative(
        |x: T| {
            if x <= T::zero() {
                return Err(EvalError::Domain { kind: DomainKind::NonFinite, at: x.as_f64() });
            }
            Ok((big_f.eval(x)? / x.powf(alpha)).powf(p))
        },
        s.half_line_tol,
        rel,
    )?;
    let denominator = half_line_relative(
        |x: T| {
            if x <= T::zero() {
                return Err(EvalError::Domain { kind: DomainKind::NonFinite, at: x.as_f64() });
            }
            Ok((x.powf(T::one() - alpha) * f.expression.eval(x)?).powf(p))
        },
        s.half_line_tol,
        rel,
    )?;
    if !(denominator > T::zero()) {
        return Err(Error::InvalidArgument("weighted norm of f vanishes".into()));
    }
    let ratio = (numerator / denominator).powf(p.recip());
    Ok(Enclosure::new(params.lower(), ratio, params.upper()))
}

fn integrate_product<T: Scalar>(us: &[&FunctionSpec<T>], power: i32, iv: &Interval<T>, s: &Settings<T>) -> Result<T> {
    let g = |x: T| {
        let mut v = T::one();
        for u in us {
            v = v * u.expression.eval(x)?;
        }
        Ok(v.powi(power))
    };
    Ok(integrate_fn(g, iv.a(), iv.b(), s.quad_tol)?.value)
}

/// `(int prod u_k)^n <= prod int u_k^n` for non-negative `u_k`.
pub fn holder_product_check<T: Scalar>(us: &[FunctionSpec<T>], iv: &Interval<T>, s: &Settings<T>) -> Result<Comparison<T>> {
    if us.is_empty() {
        return Err(Error::InvalidArgument("at least one factor is required".into()));
    }
    for (i, u) in us.iter().enumerate() {
        nonnegative_on(u, i, iv, s)?;
    }
    let n = us.len() as i32;
    let refs: Vec<&FunctionSpec<T>> = us.iter().collect();
    let lhs = integrate_product(&refs, 1, iv, s)?.powi(n);
    let mut rhs = T::one();
    for u in us {
        rhs = rhs * integrate_product(&[u], n, iv, s)?;
    }
    Ok(Comparison { lhs, rhs })
}

/// Certificate for `u^n` where `u > 0` is convex.
///
/// Fails if the hypotheses on `u` do not hold; the returned verdict is what the
/// evidence shows for `u^n`.
pub fn power_convexity<T: Scalar>(
    u: &FunctionSpec<T>,
    n: u32,
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<ConvexityCertificate<T>> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    positive_on(u, 0, iv, s)?;
    convex_hypothesis(u, 0, iv, s)?;
    certify(&u.expression.powi(n as i32), 0, iv, s.grid, s.certify_tol)
}

/// Certificate of the product `prod u_k`, which need not be convex.
pub fn product_certificate<T: Scalar>(
    us: &[FunctionSpec<T>],
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<ConvexityCertificate<T>> {
    let factors: Vec<Expression> = us.iter().map(|u| u.expression.clone()).collect();
    let product = Expression::product(&factors)
        .ok_or_else(|| Error::InvalidArgument("at least one factor is required".into()))?;
    certify(&product, 0, iv, s.grid, s.certify_tol)
}

/// `(u(a)^p + u(b)^p)^(1/p)`
fn endpoint_norm<T: Scalar>(u: &FunctionSpec<T>, p: T, iv: &Interval<T>) -> Result<T> {
    Ok((u.eval(iv.a())?.powf(p) + u.eval(iv.b())?.powf(p)).powf(p.recip()))
}

fn half_product<T: Scalar>(factors: &[T]) -> T {
    factors.iter().fold(T::one(), |acc, &v| acc * v) * T::lit(0.5)
}

fn convex_nonnegative<T: Scalar>(us: &[&FunctionSpec<T>], iv: &Interval<T>, s: &Settings<T>) -> Result<()> {
    for (i, u) in us.iter().enumerate() {
        nonnegative_on(u, i, iv, s)?;
        convex_hypothesis(u, 0, iv, s)?;
    }
    Ok(())
}

/// `mean(prod u_k) <= (1/2) prod (u_k(a)^n + u_k(b)^n)^(1/n)` for `n >= 2`
/// non-negative convex factors.
pub fn product_bound<T: Scalar>(us: &[FunctionSpec<T>], iv: &Interval<T>, s: &Settings<T>) -> Result<Comparison<T>> {
    if us.len() < 2 {
        return Err(Error::InvalidArgument("product_bound needs at least two factors".into()));
    }
    let refs: Vec<&FunctionSpec<T>> = us.iter().collect();
    convex_nonnegative(&refs, iv, s)?;
    let n = T::from_count(us.len());
    let lhs = integrate_product(&refs, 1, iv, s)? / iv.width();
    let norms = us.iter().map(|u| endpoint_norm(u, n, iv)).collect::<Result<Vec<T>>>()?;
    Ok(Comparison { lhs, rhs: half_product(&norms) })
}

/// `mean(u v) <= (1/2) (u(a)^p + u(b)^p)^(1/p) (v(a)^q + v(b)^q)^(1/q)` for
/// conjugate exponents.
pub fn ion_bound<T: Scalar>(
    u: &FunctionSpec<T>,
    v: &FunctionSpec<T>,
    p: T,
    q: T,
    iv: &Interval<T>,
    s: &Settings<T>,
) -> Result<Comparison<T>> {
    if !(p > T::one() && q > T::one()) {
        return Err(Error::Parameter(format!("p and q must exceed 1, got {} and {}", p.as_f64(), q.as_f64())));
    }
    if (p.recip() + q.recip() - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(4.0)) {
        return Err(Error::Parameter(format!("1/p + 1/q must equal 1, got p = {}, q = {}", p.as_f64(), q.as_f64())));
    }
    let refs = [u, v];
    convex_nonnegative(&refs, iv, s)?;
    let lhs = integrate_product(&refs, 1, iv, s)? / iv.width();
    let norms = [endpoint_norm(u, p, iv)?, endpoint_norm(v, q, iv)?];
    Ok(Comparison { lhs, rhs: half_product(&norms) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Verdict;

    fn close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    fn on(src: &str, a: f64, b: f64) -> FunctionSpec<f64> {
        FunctionSpec::on_interval(src, a, b).unwrap()
    }

    fn unit() -> Interval<f64> {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn params() {
        assert!(HardyParams::new(1.0, 1.0).is_err());
        assert!(HardyParams::new(0.4, 2.0).is_err());
        let p = HardyParams::new(1.0, 2.0).unwrap();
        close(p.lower(), 2f64.sqrt(), 1e-15);
        close(p.upper(), 2.0, 1e-15);
    }

    #[test]
    fn hardy_exponential() {
        let f = FunctionSpec::on_half_line("exp(-x)").unwrap();
        let s = Settings::default();
        let e = hardy_ratio(&f, &HardyParams::new(1.0, 2.0).unwrap(), 1e-8, &s).unwrap();
        close(e.value, 2.0 * 2f64.ln().sqrt(), 1e-7);
        assert!(e.holds(0.0));
    }

    #[test]
    fn hardy_rejects_concave() {
        let f = FunctionSpec::on_half_line("1/(1+x^2)").unwrap();
        let s = Settings::default();
        assert!(matches!(
            hardy_ratio(&f, &HardyParams::new(1.0, 2.0).unwrap(), 1e-8, &s),
            Err(Error::ConvexityNotCertified { .. })
        ));
    }

    #[test]
    fn holder() {
        let s = Settings::default();
        let c = holder_product_check(&[on("x", 0.0, 1.0), on("x", 0.0, 1.0)], &unit(), &s).unwrap();
        close(c.lhs, 1.0 / 9.0, 1e-10);
        close(c.rhs, 1.0 / 9.0, 1e-10);
        let c = holder_product_check(&[on("x", 0.0, 1.0), on("1", 0.0, 1.0)], &unit(), &s).unwrap();
        close(c.lhs, 0.25, 1e-10);
        close(c.rhs, 1.0 / 3.0, 1e-10);
        let c = holder_product_check(&[on("exp(x)", 0.0, 1.0)], &unit(), &s).unwrap();
        assert_eq!(c.lhs, c.rhs);
        assert!(matches!(
            holder_product_check(&[on("x - 0.5", 0.0, 1.0)], &unit(), &s),
            Err(Error::Positivity { index: 0, .. })
        ));
    }

    #[test]
    fn powers() {
        let s = Settings::default();
        let iv = Interval::new(0.1, 1.0).unwrap();
        assert_eq!(power_convexity(&on("x", 0.1, 1.0), 3, &iv, &s).unwrap().verdict, Verdict::Convex);
        assert_eq!(power_convexity(&on("exp(x)", 0.0, 1.0), 2, &unit(), &s).unwrap().verdict, Verdict::Convex);
        let iv = Interval::new(0.0, 2.0).unwrap();
        assert!(power_convexity(&on("x*(2-x)", 0.0, 2.0), 2, &iv, &s).is_err());
    }

    #[test]
    fn nonconvex_product() {
        let s = Settings::default();
        let iv = Interval::new(0.0, 2.0).unwrap();
        let us = [on("x^2", 0.0, 2.0), on("(2-x)^2", 0.0, 2.0)];
        assert_eq!(product_certificate(&us, &iv, &s).unwrap().verdict, Verdict::Neither);
    }

    #[test]
    fn products() {
        let s = Settings::default();
        let c = product_bound(&[on("x", 0.0, 1.0), on("x", 0.0, 1.0)], &unit(), &s).unwrap();
        close(c.lhs, 1.0 / 3.0, 1e-10);
        close(c.rhs, 0.5, 1e-15);
        let e = std::f64::consts::E;
        let c = product_bound(&[on("x", 0.0, 1.0), on("exp(x)", 0.0, 1.0)], &unit(), &s).unwrap();
        close(c.lhs, 1.0, 1e-10);
        close(c.rhs, 0.5 * (1.0 + e * e).sqrt(), 1e-15);
        let iv = Interval::new(0.0, 2.0).unwrap();
        let c = product_bound(&[on("x", 0.0, 2.0), on("x^2", 0.0, 2.0)], &iv, &s).unwrap();
        close(c.lhs, 2.0, 1e-10);
        close(c.rhs, 4.0, 1e-14);
        assert!(product_bound(&[on("x", 0.0, 1.0)], &unit(), &s).is_err());
    }

    #[test]
    fn ion() {
        let s = Settings::default();
        let (u, v) = (on("x", 0.0, 1.0), on("exp(x)", 0.0, 1.0));
        let c = ion_bound(&u, &v, 2.0, 2.0, &unit(), &s).unwrap();
        let d = product_bound(&[u.clone(), v.clone()], &unit(), &s).unwrap();
        assert_eq!(c, d);
        assert!(matches!(ion_bound(&u, &v, 1.0, 2.0, &unit(), &s), Err(Error::Parameter(_))));
        assert!(matches!(ion_bound(&u, &v, 3.0, 2.0, &unit(), &s), Err(Error::Parameter(_))));
        let c = ion_bound(&u, &u, 3.0, 1.5, &unit(), &s).unwrap();
        close(c.lhs, 1.0 / 3.0, 1e-10);
        close(c.rhs, 0.5, 1e-15);
    }
}
