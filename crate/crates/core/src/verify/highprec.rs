//! Arbitrary-precision reference values of `J_ν` and `H_ν^{(1,2)}`.
//!
//! Independent of the fast path: Gamma comes from Spouge's formula, the
//! derivative from the order recurrence `Z'_ν = Z_{ν-1} - (ν/z) Z_ν`, and the
//! working precision is fixed up front from a cancellation estimate. Each
//! value is computed at two precisions and must agree to the requested
//! number of digits.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use super::VerifyError;
use crate::arith::{with_precision, Cx, Mp, Real};
use crate::cylinder::CylinderValue;

const GUARD_DIGITS: f64 = 10.0;
const LOG10_2: f64 = std::f64::consts::LOG10_2;
/// Working digits per delivered Gamma digit: Spouge with `a = 1.26 D` terms
/// loses about `0.43 a` digits to cancellation.
const SPOUGE_FACTOR: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleFunction {
    J,
    H1,
    H2,
}

type C = Cx<Mp>;

thread_local! {
    static SPOUGE: RefCell<HashMap<(usize, usize), Vec<Mp>>> = RefCell::new(HashMap::new());
}

fn spouge_a() -> usize {
    let digits = Mp::precision_bits() as f64 * LOG10_2;
    ((digits / SPOUGE_FACTOR) * 1.26).ceil() as usize + 2
}

/// `c_0 = √(2π)`, `c_k = (-1)^{k-1} (a-k)^{k-1/2} e^{a-k} / (k-1)!`.
fn spouge_coefficients(a: usize) -> Vec<Mp> {
    let key = (Mp::precision_bits(), a);
    if let Some(v) = SPOUGE.with(|s| s.borrow().get(&key).cloned()) {
        return v;
    }
    let mut c = Vec::with_capacity(a);
    c.push((Mp::pi().scale_pow2(1)).sqrt());
    let mut fact = Mp::one();
    for k in 1..a {
        if k > 1 {
            fact = fact * Mp::from_f64((k - 1) as f64);
        }
        let base = Mp::from_f64((a - k) as f64);
        let mag = (Mp::from_f64(k as f64 - 0.5) * base.ln() + base).exp() / fact.clone();
        c.push(if k % 2 == 1 { mag } else { -mag });
    }
    SPOUGE.with(|s| s.borrow_mut().insert(key, c.clone()));
    c
}

fn gamma_mp(w: &C) -> C {
    if w.re < Mp::from_f64(0.5) {
        let pi = C::real(Mp::pi());
        let s = (w.clone() * pi.clone()).sin();
        return pi / (s * gamma_mp(&(C::one() - w.clone())));
    }
    let a = spouge_a();
    let c = spouge_coefficients(a);
    let z = w.clone() - C::one();
    let mut sum = C::real(c[0].clone());
    for (k, ck) in c.iter().enumerate().skip(1) {
        sum = sum + C::real(ck.clone()) / (z.clone() + C::from_f64(k as f64));
    }
    let za = z.clone() + C::from_f64(a as f64);
    let power = ((z + C::from_f64(0.5)) * za.ln() - za).exp();
    power * sum
}

fn rgamma_mp(w: &C) -> C {
    if w.re < Mp::from_f64(0.5) {
        let pi = C::real(Mp::pi());
        let s = (w.clone() * pi.clone()).sin();
        return s * gamma_mp(&(C::one() - w.clone())) / pi;
    }
    C::one() / gamma_mp(w)
}

/// Ascending series for `J_ν(z)`, given `rg = 1/Γ(ν+1)`.
fn j_mp(nu: &C, z: &C, rg: C) -> C {
    let eps = Mp::epsilon();
    let w = -(z.clone() * z.clone()).scale_pow2(-2);
    let mut t = z.scale_pow2(-1).pow(nu) * rg;
    let mut sum = t.clone();
    let bound = nu.norm_f64() + z.norm_f64() + 2.0;
    let mut m = 1usize;
    loop {
        t = t * w.clone() / ((nu.clone() + C::from_f64(m as f64)).scale(&Mp::from_f64(m as f64)));
        sum = sum + t.clone();
        if m as f64 > bound && t.norm_f64() <= eps * 1e-3 * sum.norm_f64() {
            break;
        }
        m += 1;
        if m > 100_000 {
            break;
        }
    }
    sum
}

/// `H = (J_{-ν} - e^{∓iπν} J_ν) / (±i sin πν)` from the two series.
fn hankel_mp(kind: OracleFunction, nu: &C, jp: C, jm: C) -> C {
    let pi_nu = nu.scale(&Mp::pi());
    let s = pi_nu.sin();
    match kind {
        OracleFunction::H1 => (jm - (-pi_nu.mul_i()).exp() * jp) / s.mul_i(),
        OracleFunction::H2 => (jm - pi_nu.mul_i().exp() * jp) / (-s.mul_i()),
        OracleFunction::J => jp,
    }
}

fn eval(func: OracleFunction, order: Complex64, arg: Complex64) -> (Complex64, Complex64) {
    let nu = C::from_c64(order);
    let nu1 = nu.clone() - C::one();
    let z = C::from_c64(arg);
    // two Gamma values serve all four series: 1/Γ(ν) = ν/Γ(ν+1), 1/Γ(2-ν) = 1/((1-ν)Γ(1-ν))
    let gp = rgamma_mp(&(nu.clone() + C::one()));
    let jp = j_mp(&nu, &z, gp.clone());
    let jp1 = j_mp(&nu1, &z, nu.clone() * gp);
    let (v, vm) = match func {
        OracleFunction::J => (jp, jp1),
        kind => {
            let gm = rgamma_mp(&(C::one() - nu.clone()));
            let jm = j_mp(&(-nu.clone()), &z, gm.clone());
            let jm1 = j_mp(&(-nu1.clone()), &z, gm / (C::one() - nu.clone()));
            (hankel_mp(kind, &nu, jp, jm), hankel_mp(kind, &nu1, jp1, jm1))
        }
    };
    let d = vm - nu / z.clone() * v.clone();
    (v.to_c64(), d.to_c64())
}

fn working_bits(order: Complex64, arg: Complex64, digits: u32) -> usize {
    let cancel = (arg.norm() + std::f64::consts::PI * order.im.abs()) / std::f64::consts::LN_10 + 5.0;
    let series = arg.norm() / std::f64::consts::LN_10;
    let gamma_digits = digits as f64 + GUARD_DIGITS + cancel;
    let total = (SPOUGE_FACTOR * gamma_digits).max(gamma_digits + series) + 10.0;
    (total / LOG10_2).ceil() as usize
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1e-300)
}

/// `J_ν`, `H¹_ν` or `H²_ν` at `(order, arg)` with its argument derivative,
/// certified to `digits - 10` significant digits (limited on output by `f64`).
pub fn highprec_cylinder_oracle(
    func: OracleFunction,
    order: Complex64,
    arg: Complex64,
    digits: u32,
) -> Result<CylinderValue, VerifyError> {
    if digits < 30 {
        return Err(VerifyError::InvalidRequest(format!("digits = {digits} below 30")));
    }
    if arg.norm() == 0.0 || (arg.im == 0.0 && arg.re < 0.0) {
        return Err(VerifyError::InvalidRequest(format!("argument {arg} off the principal domain")));
    }
    if func != OracleFunction::J && (order - Complex64::new(order.re.round(), 0.0)).norm() < 1e-12 {
        return Err(VerifyError::InvalidRequest(format!("integer order {order} on the reflection path")));
    }
    let bits = working_bits(order, arg, digits);
    let (v1, d1) = with_precision(bits, || eval(func, order, arg));
    let (v2, d2) = with_precision(bits + 128, || eval(func, order, arg));
    let tol = 10f64.powf(-(digits as f64 - GUARD_DIGITS)).max(1e-17);
    if !close(v1, v2, tol) || !close(d1, d2, tol) {
        return Err(VerifyError::NotCertified {
            what: format!("{func:?}({order}, {arg})"),
            difference: (v1 - v2).norm() / v2.norm(),
        });
    }
    Ok(CylinderValue { value: v2, deriv_arg: d2 })
}
