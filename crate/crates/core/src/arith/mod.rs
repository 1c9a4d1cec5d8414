//! Extended-precision scalar arithmetic used by the cylinder-function kernels.
//!
//! The series for Bessel functions of complex order lose digits to
//! cancellation once the argument grows past a few units, so the kernels are
//! written once against [`Real`] and instantiated with double-double
//! ([`Dd`]) or with a multiprecision float ([`Mp`]).

mod complex;
mod dd;
mod gamma;
mod mp;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};

pub use complex::Cx;
pub use dd::Dd;
pub use gamma::{bernoulli_even, gamma, recip_gamma};
pub use mp::{with_precision, Mp};

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Unit roundoff of the working precision.
    fn epsilon() -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn atan2(y: &Self, x: &Self) -> Self;
    fn pi() -> Self;
    /// Multiply by `2^e` exactly.
    fn scale_pow2(&self, e: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn sinh_cosh(&self) -> (Self, Self) {
        let e = self.exp();
        let ei = Self::one() / e.clone();
        let s = (e.clone() - ei.clone()).scale_pow2(-1);
        let c = (e + ei).scale_pow2(-1);
        (s, c)
    }

    fn from_bigint(n: &BigInt) -> Self {
        let (sign, digits) = n.to_u32_digits();
        let mut acc = Self::zero();
        for d in digits.iter().rev() {
            acc = acc.scale_pow2(32) + Self::from_f64(*d as f64);
        }
        if sign == Sign::Minus {
            -acc
        } else {
            acc
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn epsilon() -> f64 {
        f64::EPSILON / 2.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn atan2(y: &Self, x: &Self) -> Self {
        y.atan2(*x)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn scale_pow2(&self, e: i32) -> Self {
        self * 2f64.powi(e)
    }
}
