use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Real;

/// Complex number over a generic [`Real`] scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Cx::new(T::from_f64(z.re), T::from_f64(z.im))
    }

    pub fn real(x: T) -> Self {
        Cx::new(x, T::zero())
    }

    pub fn from_f64(x: f64) -> Self {
        Cx::real(T::from_f64(x))
    }

    pub fn zero() -> Self {
        Cx::new(T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Cx::new(T::one(), T::zero())
    }

    pub fn i() -> Self {
        Cx::new(T::zero(), T::one())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Cx::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }

    pub fn scale_pow2(&self, e: i32) -> Self {
        Cx::new(self.re.scale_pow2(e), self.im.scale_pow2(e))
    }

    /// Multiply by `i`.
    pub fn mul_i(&self) -> Self {
        Cx::new(-self.im.clone(), self.re.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.re == T::zero() && self.im == T::zero()
    }

    /// `|z|` computed without intermediate overflow.
    pub fn norm(&self) -> T {
        let a = self.re.abs();
        let b = self.im.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big == T::zero() {
            return T::zero();
        }
        let r = small / big.clone();
        big * (T::one() + r.clone() * r).sqrt()
    }

    /// `|z|` as an `f64`, for error bookkeeping.
    pub fn norm_f64(&self) -> f64 {
        let z = self.to_c64();
        if z.re.is_finite() && z.im.is_finite() && (z.re != 0.0 || z.im != 0.0) {
            z.norm()
        } else {
            self.norm().to_f64()
        }
    }

    pub fn arg(&self) -> T {
        T::atan2(&self.im, &self.re)
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Cx::new(m.clone() * c, m * s)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Cx::new(self.norm().ln(), self.arg())
    }

    /// Principal power `self^w`.
    pub fn pow(&self, w: &Self) -> Self {
        (w.clone() * self.ln()).exp()
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Cx::zero();
        }
        let r = self.norm();
        let half = T::from_f64(0.5);
        let a = ((r.clone() + self.re.abs()) * half).sqrt();
        if self.re >= T::zero() {
            let b = self.im.clone() / (a.clone() * T::from_f64(2.0));
            Cx::new(a, b)
        } else {
            let b = self.im.abs() / (a.clone() * T::from_f64(2.0));
            let a_sign = if self.im >= T::zero() { a } else { -a };
            Cx::new(b, a_sign)
        }
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        Cx::new(s * ch, c * sh)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        Cx::new(c * ch, -(s * sh))
    }
}

impl<T: Real> Add for Cx<T> {
    type Output = Cx<T>;
    fn add(self, b: Cx<T>) -> Cx<T> {
        Cx::new(self.re + b.re, self.im + b.im)
    }
}

impl<T: Real> Sub for Cx<T> {
    type Output = Cx<T>;
    fn sub(self, b: Cx<T>) -> Cx<T> {
        Cx::new(self.re - b.re, self.im - b.im)
    }
}

impl<T: Real> Neg for Cx<T> {
    type Output = Cx<T>;
    fn neg(self) -> Cx<T> {
        Cx::new(-self.re, -self.im)
    }
}

impl<T: Real> Mul for Cx<T> {
    type Output = Cx<T>;
    fn mul(self, b: Cx<T>) -> Cx<T> {
        Cx::new(
            self.re.clone() * b.re.clone() - self.im.clone() * b.im.clone(),
            self.re * b.im + self.im * b.re,
        )
    }
}

impl<T: Real> Div for Cx<T> {
    type Output = Cx<T>;
    /// Smith's algorithm.
    fn div(self, b: Cx<T>) -> Cx<T> {
        if b.re.abs() >= b.im.abs() {
            let r = b.im.clone() / b.re.clone();
            let d = b.re + r.clone() * b.im;
            Cx::new(
                (self.re.clone() + self.im.clone() * r.clone()) / d.clone(),
                (self.im - self.re * r) / d,
            )
        } else {
            let r = b.re.clone() / b.im.clone();
            let d = b.re * r.clone() + b.im;
            Cx::new(
                (self.re.clone() * r.clone() + self.im.clone()) / d.clone(),
                (self.im * r - self.re) / d,
            )
        }
    }
}
