//! Multiprecision scalar backed by `astro-float`.
//!
//! Every operation rounds to the precision installed for the current thread
//! by [`with_precision`].

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use super::Real;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static PRECISION: Cell<usize> = const { Cell::new(256) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn prec() -> usize {
    PRECISION.with(|p| p.get())
}

/// Run `f` with multiprecision arithmetic rounded to `bits` significant bits.
pub fn with_precision<R>(bits: usize, f: impl FnOnce() -> R) -> R {
    let bits = bits.max(64);
    let old = PRECISION.with(|p| p.replace(bits));
    let out = f();
    PRECISION.with(|p| p.set(old));
    out
}

#[derive(Clone, Debug)]
pub struct Mp(pub BigFloat);

impl Mp {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    pub fn precision_bits() -> usize {
        prec()
    }

    pub fn parse(s: &str) -> Mp {
        CONSTS.with(|cc| Mp(BigFloat::parse(s, astro_float::Radix::Dec, prec(), RM, &mut cc.borrow_mut())))
    }

    pub fn to_decimal(&self) -> String {
        CONSTS.with(|cc| {
            self.0
                .format(astro_float::Radix::Dec, RM, &mut cc.borrow_mut())
                .unwrap_or_else(|_| "NaN".to_string())
        })
    }
}

impl PartialEq for Mp {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, b: Mp) -> Mp {
        Mp(self.0.add(&b.0, prec(), RM))
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, b: Mp) -> Mp {
        Mp(self.0.sub(&b.0, prec(), RM))
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, b: Mp) -> Mp {
        Mp(self.0.mul(&b.0, prec(), RM))
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, b: Mp) -> Mp {
        Mp(self.0.div(&b.0, prec(), RM))
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(self.0.neg())
    }
}

fn ldexp(x: f64, mut e: i64) -> f64 {
    let mut y = x;
    while e > 1000 {
        y *= 2f64.powi(1000);
        e -= 1000;
        if y.is_infinite() {
            return y;
        }
    }
    while e < -1000 {
        y *= 2f64.powi(-1000);
        e += 1000;
        if y == 0.0 {
            return y;
        }
    }
    y * 2f64.powi(e as i32)
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, prec()))
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, e, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let n = words.len();
        let top = words[n - 1] as f64;
        let next = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        let m = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
        let v = ldexp(m, e as i64);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    fn epsilon() -> f64 {
        ldexp(1.0, -(prec() as i64))
    }

    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }

    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(prec(), RM))
    }

    fn exp(&self) -> Self {
        CONSTS.with(|cc| Mp(self.0.exp(prec(), RM, &mut cc.borrow_mut())))
    }

    fn ln(&self) -> Self {
        CONSTS.with(|cc| Mp(self.0.ln(prec(), RM, &mut cc.borrow_mut())))
    }

    fn sin_cos(&self) -> (Self, Self) {
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            (
                Mp(self.0.sin(prec(), RM, &mut cc)),
                Mp(self.0.cos(prec(), RM, &mut cc)),
            )
        })
    }

    fn atan2(y: &Self, x: &Self) -> Self {
        let zero = BigFloat::from_f64(0.0, 64);
        if x.0.is_zero() && y.0.is_zero() {
            return Mp(zero);
        }
        let pi = Mp::pi();
        if x.0.is_zero() {
            let half = pi.scale_pow2(-1);
            return if y.0.is_negative() { -half } else { half };
        }
        // reduce to |ratio| <= 1 for the series inside atan
        let ax = x.abs();
        let ay = y.abs();
        let base = if ay <= ax {
            CONSTS.with(|cc| Mp((ay / ax).0.atan(prec(), RM, &mut cc.borrow_mut())))
        } else {
            let t = CONSTS.with(|cc| Mp((ax / ay).0.atan(prec(), RM, &mut cc.borrow_mut())));
            pi.scale_pow2(-1) - t
        };
        let quad = if x.0.is_negative() { pi - base } else { base };
        if y.0.is_negative() {
            -quad
        } else {
            quad
        }
    }

    fn pi() -> Self {
        CONSTS.with(|cc| Mp(cc.borrow_mut().pi(prec(), RM)))
    }

    fn scale_pow2(&self, e: i32) -> Self {
        if self.0.is_zero() || self.0.is_nan() || self.0.is_inf() {
            return self.clone();
        }
        let mut v = self.0.clone();
        let cur = v.exponent().unwrap_or(0) as i64;
        let target = cur + e as i64;
        if target > astro_float::EXPONENT_MAX as i64 || target < astro_float::EXPONENT_MIN as i64 {
            return self.clone() * Mp::from_f64(2f64.powi(e));
        }
        v.set_exponent(target as astro_float::Exponent);
        Mp(v)
    }
}
