//! Truncated Taylor arithmetic up to degree 3.
//!
//! Internally a [`Taylor`] stores normalized coefficients `f^(k)(x)/k!`; the
//! public [`Jet`] stores plain derivatives.

use crate::Scalar;

use super::{DomainKind, EvalError};

/// Highest derivative order a jet carries.
pub const MAX_ORDER: usize = 3;

/// Value and derivatives `f(x), f'(x), f''(x), f'''(x)` at a point, truncated
/// at `order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    order: usize,
    derivs: [T; MAX_ORDER + 1],
}

impl<T: Scalar> Jet<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    /// The derivatives `f, f', ..., f^(order)`.
    pub fn coefficients(&self) -> &[T] {
        &self.derivs[..=self.order]
    }

    /// The `k`-th derivative, or `None` when `k` exceeds the jet order.
    pub fn derivative(&self, k: usize) -> Option<T> {
        (k <= self.order).then(|| self.derivs[k])
    }

    pub fn value(&self) -> T {
        self.derivs[0]
    }

    /// First derivative. Panics if the jet has order 0.
    pub fn d1(&self) -> T {
        self.derivative(1).expect("jet order >= 1")
    }

    /// Second derivative. Panics if the jet has order < 2.
    pub fn d2(&self) -> T {
        self.derivative(2).expect("jet order >= 2")
    }

    /// Third derivative. Panics if the jet has order < 3.
    pub fn d3(&self) -> T {
        self.derivative(3).expect("jet order >= 3")
    }

    pub(crate) fn from_taylor(t: &Taylor<T>) -> Self {
        let mut derivs = [T::zero(); MAX_ORDER + 1];
        let mut factorial = T::one();
        for (k, (d, &c)) in derivs.iter_mut().zip(&t.c).take(t.n + 1).enumerate() {
            if k > 0 {
                factorial = factorial * T::from_count(k);
            }
            *d = c * factorial;
        }
        Jet { order: t.n, derivs }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Taylor<T> {
    pub(crate) c: [T; MAX_ORDER + 1],
    pub(crate) n: usize,
}

fn domain(kind: DomainKind, at: f64) -> EvalError {
    EvalError::Domain { kind, at }
}

impl<T: Scalar> Taylor<T> {
    pub(crate) fn constant(v: T, n: usize) -> Self {
        let mut c = [T::zero(); MAX_ORDER + 1];
        c[0] = v;
        Taylor { c, n }
    }

    pub(crate) fn variable(x: T, n: usize) -> Self {
        let mut t = Self::constant(x, n);
        if n >= 1 {
            t.c[1] = T::one();
        }
        t
    }

    fn map2(self, o: Self, f: impl Fn(T, T) -> T) -> Self {
        let mut r = self;
        for k in 0..=self.n {
            r.c[k] = f(self.c[k], o.c[k]);
        }
        r
    }

    pub(crate) fn add(self, o: Self) -> Self {
        self.map2(o, |a, b| a + b)
    }

    pub(crate) fn sub(self, o: Self) -> Self {
        self.map2(o, |a, b| a - b)
    }

    pub(crate) fn neg(self) -> Self {
        let mut r = self;
        for k in 0..=self.n {
            r.c[k] = -self.c[k];
        }
        r
    }

    pub(crate) fn mul(self, o: Self) -> Self {
        let mut r = Self::constant(T::zero(), self.n);
        for k in 0..=self.n {
            let mut s = T::zero();
            for i in 0..=k {
                s = s + self.c[i] * o.c[k - i];
            }
            r.c[k] = s;
        }
        r
    }

    pub(crate) fn div(self, o: Self, at: f64) -> Result<Self, EvalError> {
        if o.c[0] == T::zero() {
            return Err(domain(DomainKind::DivisionByZero, at));
        }
        let mut q = Self::constant(T::zero(), self.n);
        for k in 0..=self.n {
            let mut s = self.c[k];
            for i in 1..=k {
                s = s - o.c[i] * q.c[k - i];
            }
            q.c[k] = s / o.c[0];
        }
        Ok(q)
    }

    pub(crate) fn exp(self) -> Self {
        let mut e = Self::constant(self.c[0].exp(), self.n);
        for k in 1..=self.n {
            let mut s = T::zero();
            for j in 1..=k {
                s = s + T::from_count(j) * self.c[j] * e.c[k - j];
            }
            e.c[k] = s / T::from_count(k);
        }
        e
    }

    pub(crate) fn ln(self, at: f64) -> Result<Self, EvalError> {
        let a0 = self.c[0];
        if !(a0 > T::zero()) {
            return Err(domain(DomainKind::LogOfNonPositive, at));
        }
        let mut l = Self::constant(a0.ln(), self.n);
        for k in 1..=self.n {
            let mut s = T::zero();
            for j in 1..k {
                s = s + T::from_count(j) * l.c[j] * self.c[k - j];
            }
            l.c[k] = (self.c[k] - s / T::from_count(k)) / a0;
        }
        Ok(l)
    }

    pub(crate) fn sqrt(self, at: f64) -> Result<Self, EvalError> {
        let a0 = self.c[0];
        if a0 < T::zero() || a0.is_nan() {
            return Err(domain(DomainKind::SqrtOfNegative, at));
        }
        if a0 == T::zero() && self.n > 0 {
            return Err(domain(DomainKind::SingularDerivative, at));
        }
        let s0 = a0.sqrt();
        let mut r = Self::constant(s0, self.n);
        for k in 1..=self.n {
            let mut s = T::zero();
            for j in 1..k {
                s = s + r.c[j] * r.c[k - j];
            }
            r.c[k] = (self.c[k] - s) / (s0 + s0);
        }
        Ok(r)
    }

    pub(crate) fn sin_cos(self) -> (Self, Self) {
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = Self::constant(s0, self.n);
        let mut c = Self::constant(c0, self.n);
        for k in 1..=self.n {
            let mut ss = T::zero();
            let mut cs = T::zero();
            for j in 1..=k {
                let ja = T::from_count(j) * self.c[j];
                ss = ss + ja * c.c[k - j];
                cs = cs + ja * s.c[k - j];
            }
            let kk = T::from_count(k);
            s.c[k] = ss / kk;
            c.c[k] = -cs / kk;
        }
        (s, c)
    }

    pub(crate) fn powi(self, n: i32, at: f64) -> Result<Self, EvalError> {
        if n < 0 {
            let pos = self.powi_nonneg(n.unsigned_abs());
            return Self::constant(T::one(), self.n).div(pos, at);
        }
        Ok(self.powi_nonneg(n as u32))
    }

    fn powi_nonneg(self, mut e: u32) -> Self {
        let mut acc = Self::constant(T::one(), self.n);
        let mut base = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    /// `self^r` for a constant real exponent; requires a positive base (zero
    /// allowed for the value alone when `r > 0`).
    pub(crate) fn powf(self, r: T, at: f64) -> Result<Self, EvalError> {
        let a0 = self.c[0];
        if a0 == T::zero() && self.n == 0 && r > T::zero() {
            return Ok(Self::constant(T::zero(), 0));
        }
        if !(a0 > T::zero()) {
            return Err(domain(DomainKind::PowerOfNonPositive, at));
        }
        let mut p = Self::constant(a0.powf(r), self.n);
        for k in 1..=self.n {
            let mut s = T::zero();
            for j in 1..=k {
                let w = (r + T::one()) * T::from_count(j) - T::from_count(k);
                s = s + w * self.c[j] * p.c[k - j];
            }
            p.c[k] = s / (T::from_count(k) * a0);
        }
        Ok(p)
    }

    /// `self^e` for a variable exponent, via `exp(e ln self)`.
    pub(crate) fn pow(self, e: Self, at: f64) -> Result<Self, EvalError> {
        if self.c[0] == T::zero() && self.n == 0 && e.c[0] > T::zero() {
            return Ok(Self::constant(T::zero(), 0));
        }
        if !(self.c[0] > T::zero()) {
            return Err(domain(DomainKind::PowerOfNonPositive, at));
        }
        Ok(e.mul(self.ln(at)?).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(t: Taylor<f64>) -> Vec<f64> {
        Jet::from_taylor(&t).coefficients().to_vec()
    }

    #[test]
    fn product_rule() {
        // x * x at 3: (9, 6, 2, 0)
        let x = Taylor::variable(3.0, 3);
        assert_eq!(jet(x.mul(x)), vec![9.0, 6.0, 2.0, 0.0]);
    }

    #[test]
    fn reciprocal() {
        // 1/x at 2: (1/2, -1/4, 2/8, -6/16)
        let x = Taylor::variable(2.0, 3);
        let r = Taylor::constant(1.0, 3).div(x, 2.0).unwrap();
        assert_eq!(jet(r), vec![0.5, -0.25, 0.25, -0.375]);
    }

    #[test]
    fn sqrt_at_zero_is_singular_beyond_order_zero() {
        assert!(Taylor::variable(0.0, 1).sqrt(0.0).is_err());
        assert_eq!(jet(Taylor::variable(0.0, 0).sqrt(0.0).unwrap()), vec![0.0]);
    }

    #[test]
    fn negative_integer_power() {
        // x^-2 at 1: (1, -2, 6, -24)
        let x = Taylor::variable(1.0, 3);
        assert_eq!(jet(x.powi(-2, 1.0).unwrap()), vec![1.0, -2.0, 6.0, -24.0]);
        assert!(Taylor::variable(0.0, 1).powi(-1, 0.0).is_err());
    }

    #[test]
    fn fractional_power_matches_sqrt() {
        let x = Taylor::variable(2.5, 3);
        let a = jet(x.powf(0.5, 2.5).unwrap());
        let b = jet(x.sqrt(2.5).unwrap());
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-14, "{a:?} vs {b:?}");
        }
    }
}
