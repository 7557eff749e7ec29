//! Seeded generators of functions whose convexity holds by construction.
//!
//! Every generator draws from a [`ChaCha8Rng`]; [`trial_rng`] gives trial `i`
//! of a run its own stream, so trials can be evaluated in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexity::Interval;
use crate::expr::Expression;
use crate::function::{Domain, FunctionSpec, Provenance};
use crate::Scalar;

/// Which derivative level is convex by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvexClass {
    ConvexF,
    ConvexFPrime,
    ConvexFSecond,
    /// `f'` concave left of a sampled point and convex right of it.
    ConcaveConvexSplit,
}

impl ConvexClass {
    pub const ALL: [ConvexClass; 4] =
        [ConvexClass::ConvexF, ConvexClass::ConvexFPrime, ConvexClass::ConvexFSecond, ConvexClass::ConcaveConvexSplit];

    pub fn name(self) -> &'static str {
        match self {
            ConvexClass::ConvexF => "convex_f",
            ConvexClass::ConvexFPrime => "convex_fprime",
            ConvexClass::ConvexFSecond => "convex_fsecond",
            ConvexClass::ConcaveConvexSplit => "concave_convex_split",
        }
    }

    /// The derivative level that certifies as convex.
    pub fn level(self) -> usize {
        match self {
            ConvexClass::ConvexF => 0,
            ConvexClass::ConvexFPrime | ConvexClass::ConcaveConvexSplit => 1,
            ConvexClass::ConvexFSecond => 2,
        }
    }
}

/// The generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A spec of class `class` on a random interval, drawn from stream 0 of `seed`.
pub fn random_convex<T: Scalar>(seed: u64, class: ConvexClass) -> FunctionSpec<T> {
    let mut rng = trial_rng(seed, 0);
    let mut f = sample_convex(&mut rng, class);
    f.provenance = Provenance::Generated { seed, index: 0, class: class.name() };
    f
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// Renders a coefficient so it can be pasted after an operator.
fn num(x: f64) -> String {
    let x = round4(x);
    let x = if x == 0.0 { 0.0 } else { x };
    if x < 0.0 {
        format!("({x:.4})")
    } else {
        format!("{x:.4}")
    }
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    round4(rng.gen_range(lo..hi))
}

/// `a` in `[-2, 1)`, width in `[0.25, 2.5)`, both on a `1e-4` lattice.
pub fn random_interval<R: Rng>(rng: &mut R) -> (f64, f64) {
    let a = uniform(rng, -2.0, 1.0);
    let b = round4(a + uniform(rng, 0.25, 2.5));
    (a, b)
}

fn rate<R: Rng>(rng: &mut R, max: f64) -> f64 {
    let m = uniform(rng, 0.2, max.clamp(0.25, 2.0));
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

fn build<T: Scalar>(terms: &[String], a: f64, b: f64) -> FunctionSpec<T> {
    let text = terms.join(" + ");
    let expression = Expression::parse(&text).expect("generated expression parses");
    let iv = Interval::new(T::lit(a), T::lit(b)).expect("generated interval is proper");
    FunctionSpec::new(expression, Domain::Finite(iv))
}

fn polynomial<R: Rng>(rng: &mut R, degree: u32) -> String {
    let mut out = num(uniform(rng, -1.0, 1.0));
    for k in 1..=degree {
        let c = num(uniform(rng, -1.0, 1.0));
        if k == 1 {
            out.push_str(&format!(" + {c}*x"));
        } else {
            out.push_str(&format!(" + {c}*x^{k}"));
        }
    }
    out
}

/// A conic combination whose `class.level()` derivative is convex.
///
/// Exponential rates satisfy `|lambda| (b - a) <= 3`, which keeps every
/// function smooth on the scale of its interval.
pub fn sample_convex<T: Scalar, R: Rng>(rng: &mut R, class: ConvexClass) -> FunctionSpec<T> {
    let (a, b) = random_interval(rng);
    let max_rate = 3.0 / (b - a);
    let mut terms = Vec::new();
    match class {
        ConvexClass::ConcaveConvexSplit => {
            let c0 = uniform(rng, a + 0.2 * (b - a), b - 0.2 * (b - a));
            return sample_split(rng, a, b, c0);
        }
        _ => {
            let level = class.level();
            let count = rng.gen_range(1..=3);
            for _ in 0..count {
                let c = uniform(rng, 0.1, 2.0);
                if rng.gen_bool(0.5) {
                    let s = num(uniform(rng, a, b));
                    // antiderivatives of (x - s)^2
                    terms.push(match level {
                        0 => format!("{}*(x - {s})^2", num(c)),
                        1 => format!("{}*(x - {s})^3", num(c / 3.0)),
                        _ => format!("{}*(x - {s})^4", num(c / 12.0)),
                    });
                } else {
                    let l = rate(rng, max_rate);
                    let scale = c / l.powi(level as i32);
                    terms.push(format!("{}*exp({}*x)", num(scale.abs()), num(l)));
                    if scale < 0.0 {
                        // odd antiderivative of a positive exponential
                        let last = terms.pop().unwrap();
                        terms.push(format!("-{last}"));
                    }
                }
            }
            terms.push(polynomial(rng, level as u32 + 1));
        }
    }
    build(&terms, a, b)
}

/// A function on `[a, b]` whose `f'` is concave left of `c0` and convex right
/// of it: a conic combination of `(x-c0)^4`, `(x-c0)^6` and
/// `cosh(l (x-c0))`, plus a quadratic.
pub fn sample_split<T: Scalar, R: Rng>(rng: &mut R, a: f64, b: f64, c0: f64) -> FunctionSpec<T> {
    let max_rate = 3.0 / (b - a);
    let u = format!("(x - {})", num(c0));
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let k = num(uniform(rng, 0.1, 2.0));
        terms.push(match rng.gen_range(0..3) {
            0 => format!("{k}*{u}^4"),
            1 => format!("{k}*{u}^6"),
            _ => {
                let l = num(rate(rng, max_rate).abs());
                format!("{k}*(exp({l}*{u}) + exp(-{l}*{u}))")
            }
        });
    }
    terms.push(polynomial(rng, 2));
    build(&terms, a, b)
}

/// `c0 + sum c_k u_k` with `c0 > 0` and each `u_k` convex and positive on the
/// interval.
pub fn sample_positive_convex<T: Scalar, R: Rng>(rng: &mut R, a: f64, b: f64) -> FunctionSpec<T> {
    let max_rate = 3.0 / (b - a);
    let mut terms = vec![num(uniform(rng, 0.1, 1.0))];
    for _ in 0..rng.gen_range(1..=2) {
        let c = num(uniform(rng, 0.1, 2.0));
        if rng.gen_bool(0.5) {
            terms.push(format!("{c}*(x - {})^2", num(uniform(rng, a, b))));
        } else {
            terms.push(format!("{c}*exp({}*x)", num(rate(rng, max_rate))));
        }
    }
    build(&terms, a, b)
}

/// A positive, convex, decreasing function on `[0, inf)` that is integrable:
/// a conic combination of `exp(-l x)` and `1/(1+x)^m` with `m` in `{2, 3}`.
pub fn sample_decreasing_convex<T: Scalar, R: Rng>(rng: &mut R) -> FunctionSpec<T> {
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let c = num(uniform(rng, 0.1, 2.0));
        if rng.gen_bool(0.5) {
            terms.push(format!("{c}*exp(-{}*x)", num(uniform(rng, 0.2, 2.0))));
        } else {
            terms.push(format!("{c}/(1 + x)^{}", rng.gen_range(2..=3)));
        }
    }
    let text = terms.join(" + ");
    FunctionSpec::new(Expression::parse(&text).expect("generated expression parses"), Domain::HalfLine)
}

/// A weight `1 + c (x - a)(b - x)`, non-negative and symmetric about the
/// midpoint of `[a, b]`.
pub fn sample_symmetric_weight<T: Scalar, R: Rng>(rng: &mut R, a: f64, b: f64) -> FunctionSpec<T> {
    let c = num(uniform(rng, 0.0, 2.0));
    let text = format!("1 + {c}*(x - {})*({} - x)", num(a), num(b));
    build(&[text], a, b)
}

/// Families for which a bound is attained with equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqualityFamily {
    /// `k (x - c)^2 + m` with the split point `c` inside the interval.
    Inflection,
    /// `k (x^2 - (a+b) x) + n`
    Moment,
    /// `k (2x^3 - 3(a+b) x^2) + m x + n`
    TrapezoidGap,
}

/// A member of `family` with `k > 0`, plus the split point for
/// [`EqualityFamily::Inflection`].
pub fn sample_equality<T: Scalar, R: Rng>(rng: &mut R, family: EqualityFamily) -> (FunctionSpec<T>, Option<f64>) {
    let (a, b) = random_interval(rng);
    let k = num(uniform(rng, 0.1, 3.0));
    let m = num(uniform(rng, -2.0, 2.0));
    let n = num(uniform(rng, -2.0, 2.0));
    let s = num(a + b);
    match family {
        EqualityFamily::Inflection => {
            let c = uniform(rng, a + 0.1 * (b - a), b - 0.1 * (b - a));
            (build(&[format!("{k}*(x - {})^2 + {m}", num(c))], a, b), Some(c))
        }
        EqualityFamily::Moment => (build(&[format!("{k}*(x^2 - {s}*x) + {n}")], a, b), None),
        EqualityFamily::TrapezoidGap => (build(&[format!("{k}*(2*x^3 - 3*{s}*x^2) + {m}*x + {n}")], a, b), None),
    }
}
