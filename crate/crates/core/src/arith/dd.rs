//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! carrying roughly 106 bits of significand.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
// pi/2 split into three parts for argument reduction
const PI_2_A: f64 = std::f64::consts::FRAC_PI_2;
const PI_2_B: f64 = 6.123233995736766e-17;
const PI_2_C: f64 = -1.4973849048591698e-33;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn ldexp(x: f64, mut e: i32) -> f64 {
    let mut y = x;
    while e > 1000 {
        y *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        y *= 2f64.powi(-1000);
        e += 1000;
    }
    y * 2f64.powi(e)
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        Dd::renorm(p1, p2 + self.lo * b)
    }

    fn scale2(self, e: i32) -> Self {
        Dd { hi: ldexp(self.hi, e), lo: ldexp(self.lo, e) }
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn expm1_small(r: Dd) -> Dd {
        // Taylor series; |r| < 4e-4 after reduction
        let mut term = r;
        let mut sum = r;
        for n in 2..=11 {
            term = (term * r) / Dd::from(n as f64);
            sum = sum + term;
        }
        sum
    }

    fn sin_cos_taylor(r: Dd) -> (Dd, Dd) {
        let r2 = r * r;
        let mut s = r;
        let mut term = r;
        for n in 1..=15 {
            let d = ((2 * n) * (2 * n + 1)) as f64;
            term = -(term * r2) / Dd::from(d);
            s = s + term;
        }
        let mut c = Dd::from(1.0);
        let mut term = Dd::from(1.0);
        for n in 1..=15 {
            let d = ((2 * n - 1) * (2 * n)) as f64;
            term = -(term * r2) / Dd::from(d);
            c = c + term;
        }
        (s, c)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::renorm(s1, s2 + t2)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        Dd::renorm(p1, p2 + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::from(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Dd::new(q1, q2) + Dd::from(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::from(x)
    }

    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }

    fn epsilon() -> f64 {
        // 2^-104
        4.930380657631324e-32
    }

    fn abs(&self) -> Self {
        if self.hi < 0.0 {
            -*self
        } else {
            *self
        }
    }

    fn sqrt(&self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from(self.hi.sqrt());
        }
        let x = Dd::from(self.hi.sqrt());
        x + (*self - x.sqr()) / x.mul_f64(2.0)
    }

    fn exp(&self) -> Self {
        if self.hi > 709.7 {
            return Dd::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::from(0.0);
        }
        let k = (self.hi / LN2.hi).round();
        let r = (*self - LN2.mul_f64(k)).scale2(-10);
        let mut s = Dd::expm1_small(r);
        for _ in 0..10 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        (s + Dd::from(1.0)).scale2(k as i32)
    }

    fn ln(&self) -> Self {
        if self.hi <= 0.0 || !self.is_finite() {
            return Dd::from(self.hi.ln());
        }
        let y = Dd::from(self.hi.ln());
        y + *self * (-y).exp() - Dd::from(1.0)
    }

    fn sin_cos(&self) -> (Self, Self) {
        if !self.is_finite() {
            return (Dd::from(f64::NAN), Dd::from(f64::NAN));
        }
        let k = (self.hi / PI_2_A).round();
        let r = ((*self - Dd::from(PI_2_A).mul_f64(k)) - Dd::from(PI_2_B).mul_f64(k))
            - Dd::from(PI_2_C).mul_f64(k);
        let (s, c) = Dd::sin_cos_taylor(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn atan2(y: &Self, x: &Self) -> Self {
        let mut t = Dd::from(y.hi.atan2(x.hi));
        if y.hi == 0.0 && x.hi == 0.0 {
            return t;
        }
        for _ in 0..2 {
            let (s, c) = t.sin_cos();
            t = t + (*y * c - *x * s) / (*x * c + *y * s);
        }
        t
    }

    fn pi() -> Self {
        PI
    }

    fn scale_pow2(&self, e: i32) -> Self {
        self.scale2(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, hi: f64, lo: f64, tol: f64) {
        let d = (a - Dd::new(hi, lo)).to_f64().abs();
        assert!(d <= tol * hi.abs().max(1e-300), "{a:?} vs {hi} {lo}: {d}");
    }

    #[test]
    fn constants_and_division() {
        let third = Dd::from(1.0) / Dd::from(3.0);
        let back = third * Dd::from(3.0);
        assert!((back - Dd::from(1.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_log_roundtrip() {
        for &x in &[-30.5, -1.0, 1e-5, 0.5, 2.0, 37.25, 300.0] {
            let v = Dd::from(x).exp().ln();
            assert!((v - Dd::from(x)).to_f64().abs() < 1e-30 * x.abs().max(1.0), "{x}");
        }
        // e = 2.718281828459045 + 1.4456468917292502e-16
        close(Dd::from(1.0).exp(), 2.718281828459045, 1.4456468917292502e-16, 1e-31);
    }

    #[test]
    fn trig_identities() {
        for &x in &[0.1, 1.0, 2.5, -4.0, 40.0, 157.3] {
            let (s, c) = Dd::from(x).sin_cos();
            let one = s * s + c * c;
            assert!((one - Dd::from(1.0)).to_f64().abs() < 1e-30, "{x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-14);
        }
        let (s, _) = (PI.mul_f64(0.5)).sin_cos();
        assert!((s - Dd::from(1.0)).to_f64().abs() < 1e-31);
        let t = Dd::atan2(&Dd::from(1.0), &Dd::from(1.0));
        assert!((t - PI.mul_f64(0.25)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_two() {
        // sqrt(2) = 1.4142135623730951 - 9.667293313452913e-17
        close(Dd::from(2.0).sqrt(), 1.4142135623730951, -9.667293313452913e-17, 1e-31);
    }
}
