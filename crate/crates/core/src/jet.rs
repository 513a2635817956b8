//! Truncated Taylor series ("jets") for exact derivatives of closed-form
//! wavefunctions and of ladder-operator images built from them.
//!
//! A jet stores the normalized Taylor coefficients `f(y + h) = Σ a_k h^k`
//! for `k < JET_LEN`. Each application of a first-order differential
//! operator consumes one order, so a jet seeded at full order supports
//! `JET_LEN - 1` chained derivatives before the top coefficient is stale.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

/// Number of stored Taylor coefficients.
pub const JET_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    coeffs: [T; JET_LEN],
}

impl<T: Real> Jet<T> {
    pub fn constant(value: T) -> Self {
        let mut coeffs = [T::zero(); JET_LEN];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The independent variable seeded at `y`.
    pub fn variable(y: T) -> Self {
        let mut coeffs = [T::zero(); JET_LEN];
        coeffs[0] = y;
        coeffs[1] = T::one();
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn from_coeffs(coeffs: [T; JET_LEN]) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T; JET_LEN] {
        &self.coeffs
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> T {
        let mut fact = T::one();
        for j in 2..=k {
            fact = fact * T::from_count(j);
        }
        self.coeffs[k] * fact
    }

    /// Jet of `d/dy f`; the highest coefficient becomes unknown and is zeroed.
    pub fn differentiate(&self) -> Self {
        let mut coeffs = [T::zero(); JET_LEN];
        for k in 0..JET_LEN - 1 {
            coeffs[k] = self.coeffs[k + 1] * T::from_count(k + 1);
        }
        Self { coeffs }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut coeffs = self.coeffs;
        for c in coeffs.iter_mut() {
            *c = *c * s;
        }
        Self { coeffs }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    /// Simultaneous sine and cosine of a jet.
    pub fn sin_cos(&self) -> (Self, Self) {
        let (s0, c0) = self.coeffs[0].sin_cos();
        let mut s = [T::zero(); JET_LEN];
        let mut c = [T::zero(); JET_LEN];
        s[0] = s0;
        c[0] = c0;
        for k in 1..JET_LEN {
            let mut sk = T::zero();
            let mut ck = T::zero();
            for j in 1..=k {
                let ju = T::from_count(j) * self.coeffs[j];
                sk = sk + ju * c[k - j];
                ck = ck - ju * s[k - j];
            }
            let kk = T::from_count(k);
            s[k] = sk / kk;
            c[k] = ck / kk;
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }

    /// Quotient `self / rhs`; `rhs` must not vanish at the expansion point.
    pub fn div(&self, rhs: &Self) -> Self {
        let mut q = [T::zero(); JET_LEN];
        let b0 = rhs.coeffs[0];
        for k in 0..JET_LEN {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc = acc - rhs.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Self { coeffs: q }
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut coeffs = self.coeffs;
        for (a, b) in coeffs.iter_mut().zip(rhs.coeffs) {
            *a = *a + b;
        }
        Self { coeffs }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut coeffs = self.coeffs;
        for (a, b) in coeffs.iter_mut().zip(rhs.coeffs) {
            *a = *a - b;
        }
        Self { coeffs }
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut coeffs = [T::zero(); JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = T::zero();
            for j in 0..=k {
                acc = acc + self.coeffs[j] * rhs.coeffs[k - j];
            }
            coeffs[k] = acc;
        }
        Self { coeffs }
    }
}
