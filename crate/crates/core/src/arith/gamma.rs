//! Complex Gamma function at the working precision of the scalar type.
//!
//! Stirling's series on a shifted argument, with the reflection formula for
//! `Re w < 1/2`. Bernoulli numbers are generated exactly as rationals once.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Cx, Real};

const MAX_BERNOULLI_PAIRS: usize = 80;

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_160` as exact rationals.
pub fn bernoulli_even() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Akiyama-Tanigawa
        let n_max = 2 * MAX_BERNOULLI_PAIRS;
        let mut a: Vec<BigRational> = Vec::with_capacity(n_max + 1);
        let mut out = Vec::with_capacity(MAX_BERNOULLI_PAIRS);
        for m in 0..=n_max {
            a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
            for j in (1..=m).rev() {
                let diff = &a[j - 1] - &a[j];
                a[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
            }
            if m >= 2 && m % 2 == 0 {
                out.push(a[0].clone());
            }
        }
        out
    })
}

fn rational_to<T: Real>(r: &BigRational) -> T {
    if r.is_zero() {
        return T::zero();
    }
    T::from_bigint(r.numer()) / T::from_bigint(r.denom())
}

fn digits<T: Real>() -> f64 {
    -T::epsilon().log10()
}

/// ln Γ(w) by Stirling's series; caller guarantees `Re w` is large.
fn ln_gamma_stirling<T: Real>(w: &Cx<T>) -> Cx<T> {
    let half = T::from_f64(0.5);
    let two_pi = T::pi().scale_pow2(1);
    let mut acc = (w.clone() - Cx::real(half.clone())) * w.ln() - w.clone()
        + Cx::real(half * two_pi.ln());
    let inv = Cx::one() / w.clone();
    let inv2 = inv.clone() * inv.clone();
    let mut pow = inv;
    let eps = T::epsilon();
    for (i, b) in bernoulli_even().iter().enumerate() {
        let k = (i + 1) as f64;
        let c: T = rational_to::<T>(b) / T::from_f64(2.0 * k * (2.0 * k - 1.0));
        let term = pow.scale(&c);
        let small = term.norm_f64() < eps * acc.norm_f64() * 0.01;
        acc = acc + term;
        if small {
            break;
        }
        pow = pow * inv2.clone();
    }
    acc
}

/// Returns `(ln Γ(w+N), Π_{j<N} (w+j))` with `N` chosen so Stirling converges.
fn shifted<T: Real>(w: &Cx<T>) -> (Cx<T>, Cx<T>) {
    let w0 = 0.6 * digits::<T>() + 4.0;
    let re = w.re.to_f64();
    let n = if re < w0 { (w0 - re).ceil() as usize } else { 0 };
    let mut prod = Cx::one();
    for j in 0..n {
        prod = prod * (w.clone() + Cx::from_f64(j as f64));
    }
    let ws = w.clone() + Cx::from_f64(n as f64);
    (ln_gamma_stirling(&ws), prod)
}

/// Γ(w). Poles at non-positive integers give non-finite output.
pub fn gamma<T: Real>(w: &Cx<T>) -> Cx<T> {
    if w.re < T::from_f64(0.5) {
        let pi = Cx::real(T::pi());
        let s = (w.clone() * pi.clone()).sin();
        let g = gamma(&(Cx::one() - w.clone()));
        return pi / (s * g);
    }
    let (lg, prod) = shifted(w);
    lg.exp() / prod
}

/// 1/Γ(w), entire.
pub fn recip_gamma<T: Real>(w: &Cx<T>) -> Cx<T> {
    if w.re < T::from_f64(0.5) {
        let pi = Cx::real(T::pi());
        let s = (w.clone() * pi.clone()).sin();
        let g = gamma(&(Cx::one() - w.clone()));
        return s * g / pi;
    }
    let (lg, prod) = shifted(w);
    prod * (-lg).exp()
}
