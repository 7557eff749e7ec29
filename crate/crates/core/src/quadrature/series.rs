use crate::expr::Expression;
use crate::function::FunctionSpec;
use crate::scalar::CompensatedSum;
use crate::Scalar;

use super::{integrate_half_line_fn, QResult, QuadratureError};

/// Terms summed directly before the Euler-Maclaurin tail is tried.
const DIRECT_TERMS: u64 = 64;
const MAX_TERMS: u64 = 1 << 22;

/// `sum_{k>=1} g(k - offset)` for positive decreasing summable `g`.
///
/// Terms are summed until either a geometric tail bound (ratios of successive
/// terms non-increasing and below one) or the Euler-Maclaurin remainder
/// `|g'''(N)| / 720` drops below `tol`. In the latter case the tail
/// `int_N^inf g + g(N)/2 - g'(N)/12 + g'''(N)/720` is added.
pub fn sum_series<T: Scalar>(g: &FunctionSpec<T>, offset: T, tol: T) -> QResult<T> {
    sum_expression(&g.expression, offset, tol)
}

pub(crate) fn sum_expression<T: Scalar>(g: &Expression, offset: T, tol: T) -> QResult<T> {
    let term = |k: u64| -> QResult<T> {
        let x = T::from_u64(k).expect("index representable") - offset;
        let v = g.eval(x)?;
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { at: x.as_f64() });
        }
        Ok(v)
    };
    let slack = T::one() + T::lit(1e-12);
    let mut sum = CompensatedSum::new();
    let mut prev = term(1)?;
    if prev < T::zero() {
        return Err(QuadratureError::NegativeTerm { index: 1 });
    }
    sum.add(prev);
    let mut prev_ratio: Option<T> = None;
    let mut k = 1u64;
    let mut next_check = DIRECT_TERMS;
    loop {
        k += 1;
        let t = term(k)?;
        if t < T::zero() {
            return Err(QuadratureError::NegativeTerm { index: k });
        }
        if t > prev * slack {
            return Err(QuadratureError::NotDecreasing { index: k });
        }
        sum.add(t);
        if t == T::zero() {
            return Ok(sum.value());
        }
        let ratio = t / prev;
        if let Some(r0) = prev_ratio {
            if ratio < T::one() && ratio <= r0 * slack {
                let bound = t * ratio / (T::one() - ratio);
                if bound < tol {
                    return Ok(sum.value() + bound);
                }
            }
        }
        prev_ratio = Some(ratio);
        prev = t;

        if k >= next_check {
            let start = T::from_u64(k + 1).expect("index representable") - offset;
            let jet = g.jet(start, 3)?;
            if jet.d3().abs() / T::lit(720.0) < tol {
                // substitute x = start (1 + s) so the integrand decays on a unit scale
                let integral = integrate_half_line_fn(|s: T| g.eval(start + start * s), tol * T::lit(0.25) / start)?;
                let tail = integral.value * start + jet.value() * T::lit(0.5) - jet.d1() / T::lit(12.0)
                    + jet.d3() / T::lit(720.0);
                return Ok(sum.value() + tail);
            }
            next_check *= 2;
        }
        if k >= MAX_TERMS {
            return Err(QuadratureError::TailNotClosed { terms: k });
        }
    }
}
