//! Grid-based convexity certificates for `f`, `f'` or `f''`, and the
//! concave-to-convex split point of `f'`.
//!
//! A certificate is evidence on a finite grid, not a proof. The verdict comes
//! from the midpoint test `g((x+y)/2) <= (g(x)+g(y))/2` over every pair of
//! grid points. When a jet of order `level + 2` is available, the sampled range
//! of `g''` is recorded alongside it.

use crate::error::{Error, Result};
use crate::expr::{Expression, MAX_ORDER};
use crate::Scalar;

/// Default number of grid points.
pub const DEFAULT_GRID: usize = 257;
/// Default relative tolerance; the absolute tolerance is `tol * (1 + max|g|)`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Closed interval `[a, b]` with finite `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    a: T,
    b: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a: a.as_f64(), b: b.as_f64() })
        }
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn width(&self) -> T {
        self.b - self.a
    }

    pub fn midpoint(&self) -> T {
        (self.a + self.b) * T::lit(0.5)
    }

    pub fn contains(&self, x: T) -> bool {
        self.a <= x && x <= self.b
    }

    /// `n + 1` equally spaced points from `a` to `b` inclusive.
    pub fn linspace(&self, n: usize) -> impl Iterator<Item = T> + '_ {
        let h = self.width() / T::from_count(n.max(1));
        (0..=n).map(move |i| if i == n { self.b } else { self.a + h * T::from_count(i) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Convex,
    Concave,
    Affine,
    Neither,
}

impl Verdict {
    /// Convex or affine.
    pub fn is_convex(self) -> bool {
        matches!(self, Verdict::Convex | Verdict::Affine)
    }

    /// Concave or affine.
    pub fn is_concave(self) -> bool {
        matches!(self, Verdict::Concave | Verdict::Affine)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityCertificate<T> {
    /// Derivative level examined: 0 for `f`, 1 for `f'`, 2 for `f''`.
    pub level: usize,
    pub interval: Interval<T>,
    pub verdict: Verdict,
    pub grid_size: usize,
    /// Largest `g(mid) - (g(x)+g(y))/2` over grid pairs. Positive values are
    /// convexity violations.
    pub max_violation: T,
    /// Largest `(g(x)+g(y))/2 - g(mid)` over grid pairs.
    pub concavity_violation: T,
    /// Absolute tolerance the defects were compared against.
    pub tolerance: T,
    /// Pair of grid points with the largest defect against the verdict, for
    /// `Neither` certificates.
    pub witness: Option<(T, T)>,
    /// Sampled `(min, max)` of `g''` when derivative evidence was available.
    pub curvature: Option<(T, T)>,
}

/// Certifies convexity of the `level`-th derivative of `f` on `iv`.
///
/// `grid` must be at least 16 and `level` at most 2. `tol` is relative to the
/// largest sampled `|g|`.
pub fn certify<T: Scalar>(
    f: &Expression,
    level: usize,
    iv: &Interval<T>,
    grid: usize,
    tol: T,
) -> Result<ConvexityCertificate<T>> {
    if grid < 16 {
        return Err(Error::InvalidArgument(format!("grid must have at least 16 points, got {grid}")));
    }
    if level > 2 {
        return Err(Error::InvalidArgument(format!("derivative level must be 0, 1 or 2, got {level}")));
    }
    let with_curvature = level + 2 <= MAX_ORDER;
    let order = if with_curvature { level + 2 } else { level };

    // Midpoints of grid pairs (i, j) sit at index i + j of the doubled grid.
    let fine = 2 * (grid - 1);
    let mut g = Vec::with_capacity(fine + 1);
    let mut curv: Option<(T, T)> = None;
    for x in iv.linspace(fine) {
        let jet = f.jet(x, order)?;
        g.push(jet.coefficients()[level]);
        if with_curvature {
            let c = jet.coefficients()[level + 2];
            curv = Some(match curv {
                None => (c, c),
                Some((lo, hi)) => (lo.min(c), hi.max(c)),
            });
        }
    }

    let scale = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tolerance = tol * (T::one() + scale);
    let half = T::lit(0.5);
    let mut conv = (T::neg_infinity(), 0usize, 0usize);
    let mut conc = (T::neg_infinity(), 0usize, 0usize);
    for i in 0..grid {
        let gi = g[2 * i];
        for j in (i + 1)..grid {
            let d = g[i + j] - (gi + g[2 * j]) * half;
            if d > conv.0 {
                conv = (d, i, j);
            }
            if -d > conc.0 {
                conc = (-d, i, j);
            }
        }
    }

    let convex_ok = conv.0 <= tolerance;
    let concave_ok = conc.0 <= tolerance;
    let verdict = match (convex_ok, concave_ok) {
        (true, true) => Verdict::Affine,
        (true, false) => Verdict::Convex,
        (false, true) => Verdict::Concave,
        (false, false) => Verdict::Neither,
    };
    let point = |i: usize| iv.a() + iv.width() * T::from_count(i) / T::from_count(grid - 1);
    let witness = (verdict == Verdict::Neither).then(|| (point(conv.1), point(conv.2)));

    Ok(ConvexityCertificate {
        level,
        interval: *iv,
        verdict,
        grid_size: grid,
        max_violation: conv.0,
        concavity_violation: conc.0,
        tolerance,
        witness,
        curvature: curv,
    })
}

/// [`certify`], failing unless the verdict is convex or affine.
pub fn require_convex<T: Scalar>(
    f: &Expression,
    level: usize,
    iv: &Interval<T>,
    grid: usize,
    tol: T,
) -> Result<ConvexityCertificate<T>> {
    let cert = certify(f, level, iv, grid, tol)?;
    if cert.verdict.is_convex() {
        Ok(cert)
    } else {
        Err(Error::ConvexityNotCertified { level, verdict: cert.verdict })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

/// Finds `c` such that `f'` is concave on `[a, c]` and convex on `[c, b]`.
///
/// Returns `a` when `f'` is convex throughout and `b` when it is concave
/// throughout. The sign change of `f'''` is located by a grid scan and refined
/// by bisection; the split is the centre of the band where `f'''` rounds to zero.
pub fn find_split<T: Scalar>(f: &Expression, iv: &Interval<T>, grid: usize, tol: T) -> Result<T> {
    if grid < 16 {
        return Err(Error::InvalidArgument(format!("grid must have at least 16 points, got {grid}")));
    }
    let xs: Vec<T> = iv.linspace(grid - 1).collect();
    let mut third = Vec::with_capacity(grid);
    for &x in &xs {
        third.push(f.jet(x, 3)?.d3());
    }
    let scale = third.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let eps = tol * (T::one() + scale);
    let sign = |v: T| {
        if v < -eps {
            Sign::Neg
        } else if v > eps {
            Sign::Pos
        } else {
            Sign::Zero
        }
    };
    let signs: Vec<Sign> = third.iter().map(|&v| sign(v)).collect();
    let last_neg = signs.iter().rposition(|&s| s == Sign::Neg);
    let first_pos = signs.iter().position(|&s| s == Sign::Pos);

    let c = match (last_neg, first_pos) {
        (None, _) => iv.a(),
        (Some(_), None) => iv.b(),
        (Some(n), Some(p)) if n < p => {
            // edges of the band where f''' is indistinguishable from zero
            let left = bisect(xs[n], xs[p], |x| Ok(sign(f.jet(x, 3)?.d3()) == Sign::Neg))?;
            let right = bisect(left, xs[p], |x| Ok(sign(f.jet(x, 3)?.d3()) != Sign::Pos))?;
            (left + right) * T::lit(0.5)
        }
        _ => return Err(Error::NoSuchSplit),
    };

    validate_split(f, iv, c, grid, tol).map_err(|e| match e {
        Error::SplitNotCertified { .. } => Error::NoSuchSplit,
        other => other,
    })?;
    Ok(c)
}

/// Boundary of `pred` on `[lo, hi]`, where `pred(lo)` holds and `pred(hi)`
/// does not.
fn bisect<T: Scalar>(mut lo: T, mut hi: T, pred: impl Fn(T) -> Result<bool>) -> Result<T> {
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Checks that `f'` is concave on `[a, c]` and convex on `[c, b]`. Pieces
/// shorter than a relative `1e-9` of the interval are skipped.
pub fn validate_split<T: Scalar>(f: &Expression, iv: &Interval<T>, c: T, grid: usize, tol: T) -> Result<()> {
    if !iv.contains(c) {
        return Err(Error::SplitNotCertified { c: c.as_f64(), reason: "outside the interval".into() });
    }
    let min_len = iv.width() * T::lit(1e-9);
    if c - iv.a() > min_len {
        let left = certify(f, 1, &Interval::new(iv.a(), c)?, grid, tol)?;
        if !left.verdict.is_concave() {
            return Err(Error::SplitNotCertified {
                c: c.as_f64(),
                reason: format!("f' is {:?} on [a, c]", left.verdict),
            });
        }
    }
    if iv.b() - c > min_len {
        let right = certify(f, 1, &Interval::new(c, iv.b())?, grid, tol)?;
        if !right.verdict.is_convex() {
            return Err(Error::SplitNotCertified {
                c: c.as_f64(),
                reason: format!("f' is {:?} on [c, b]", right.verdict),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    fn iv(a: f64, b: f64) -> Interval<f64> {
        Interval::new(a, b).unwrap()
    }

    fn verdict(s: &str, level: usize, a: f64, b: f64) -> Verdict {
        certify(&expr(s), level, &iv(a, b), DEFAULT_GRID, DEFAULT_TOL).unwrap().verdict
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn basic_verdicts() {
        assert_eq!(verdict("x^2", 0, 0.0, 1.0), Verdict::Convex);
        assert_eq!(verdict("2*x+1", 0, 0.0, 1.0), Verdict::Affine);
        assert_eq!(verdict("ln(x)", 0, 0.5, 2.0), Verdict::Concave);
        assert_eq!(verdict("x^3", 1, -1.0, 1.0), Verdict::Convex);
        assert_eq!(verdict("x^3", 2, -1.0, 1.0), Verdict::Affine);
    }

    #[test]
    fn nonconvex_product_is_neither() {
        let cert = certify(&expr("x^2*(2-x)^2"), 0, &iv(0.0, 2.0), DEFAULT_GRID, DEFAULT_TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::Neither);
        assert!(cert.max_violation > cert.tolerance);
        let (x, y) = cert.witness.unwrap();
        assert!(x < y);
        // f''(1) = -4
        let (lo, _) = cert.curvature.unwrap();
        assert!((lo + 4.0).abs() < 1e-9);
    }

    #[test]
    fn certificate_invariants() {
        for s in ["x^2", "exp(x)", "2*x+1", "-x^2", "sin(3*x)"] {
            let c = certify(&expr(s), 0, &iv(-1.0, 1.0), 33, DEFAULT_TOL).unwrap();
            if c.verdict == Verdict::Convex {
                assert!(c.max_violation <= c.tolerance);
            }
            if c.verdict == Verdict::Affine {
                assert!(c.max_violation <= c.tolerance && c.concavity_violation <= c.tolerance);
            }
            assert_eq!(c.grid_size, 33);
        }
    }

    #[test]
    fn argument_checks() {
        assert!(matches!(certify(&expr("x"), 0, &iv(0.0, 1.0), 8, 1e-9), Err(Error::InvalidArgument(_))));
        assert!(matches!(certify(&expr("x"), 3, &iv(0.0, 1.0), 64, 1e-9), Err(Error::InvalidArgument(_))));
        assert!(matches!(certify(&expr("ln(x)"), 0, &iv(0.0, 1.0), 64, 1e-9), Err(Error::Eval(_))));
    }

    #[test]
    fn split_of_quartic() {
        let c = find_split(&expr("x^4/4"), &iv(-1.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap();
        assert!(c.abs() < 1e-8, "{c}");
    }

    #[test]
    fn split_of_asymmetric_cubic_derivative() {
        // f' = (x - 0.3)^3, f''' = 6 (x - 0.3); bisection on f''' as an independent check
        let f = expr("(x-0.3)^4/4");
        let c = find_split(&f, &iv(-1.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap();
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if 6.0 * (m - 0.3) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        assert!((c - hi).abs() < 1e-8, "{c} vs {hi}");
    }

    #[test]
    fn split_critical_cases() {
        assert_eq!(find_split(&expr("x^2"), &iv(0.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap(), 0.0);
        assert_eq!(find_split(&expr("exp(x)"), &iv(0.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap(), 0.0);
        assert_eq!(find_split(&expr("-exp(x)"), &iv(0.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap(), 1.0);
    }

    #[test]
    fn no_split_when_convex_then_concave() {
        assert_eq!(
            find_split(&expr("-x^4/4"), &iv(-1.0, 1.0), DEFAULT_GRID, DEFAULT_TOL),
            Err(Error::NoSuchSplit)
        );
        assert_eq!(
            find_split(&expr("sin(6*x)"), &iv(-1.0, 1.0), DEFAULT_GRID, DEFAULT_TOL),
            Err(Error::NoSuchSplit)
        );
    }

    #[test]
    fn split_invariant_under_affine_shift() {
        let base = find_split(&expr("(x-0.2)^4/4"), &iv(-1.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap();
        let shifted = find_split(&expr("(x-0.2)^4/4 + 3*x - 7"), &iv(-1.0, 1.0), DEFAULT_GRID, DEFAULT_TOL).unwrap();
        assert!((base - shifted).abs() < 2.0 / 256.0);
    }
}
