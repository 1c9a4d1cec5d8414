//! Bessel and Hankel functions of complex order and complex argument.
//!
//! All values come from the ascending series of `J_{±ν}` combined through
//! the reflection formulas
//!
//! ```text
//! H¹_ν(z) = (J_{-ν}(z) - e^{-iπν} J_ν(z)) / (i sin πν)
//! H²_ν(z) = (J_{-ν}(z) - e^{+iπν} J_ν(z)) / (-i sin πν)
//! ```
//!
//! The series is summed in double-double arithmetic while tracking a bound
//! on the accumulated round-off; if that bound exceeds the internal target
//! the evaluation is repeated in multiprecision with enough extra bits to
//! absorb the cancellation. Orders within `NEAR_INTEGER` of an integer are
//! evaluated at `ν ± h` and Richardson-extrapolated.

use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{recip_gamma, with_precision, Cx, Dd, Mp, Real};

/// Largest supported `|z|`.
pub const MAX_ARG: f64 = 60.0;
/// Largest supported `|Re ν|`.
pub const MAX_RE_ORDER: f64 = 50.0;
/// Largest supported `|Im ν|`.
pub const MAX_IM_ORDER: f64 = 20.0;
/// Orders closer than this to an integer take the extrapolation path.
pub const NEAR_INTEGER: f64 = 1e-8;
const RICHARDSON_STEP: f64 = 1e-5;
/// Round-off budget for a single evaluation before escalating precision.
const INTERNAL_TARGET: f64 = 1e-13;
const MAX_BITS: usize = 6000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CylinderError {
    #[error("order {order} / argument {arg} outside the supported domain: {reason}")]
    DomainExceeded {
        order: Complex64,
        arg: Complex64,
        reason: &'static str,
    },
    #[error("estimated relative error {estimate:e} exceeds the accuracy target")]
    AccuracyLoss { estimate: f64 },
    #[error("cylinder function vanishes at order {order}, argument {arg}")]
    ZeroDenominator { order: Complex64, arg: Complex64 },
}

/// A cylinder function value together with its derivative in the argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderValue {
    pub value: Complex64,
    pub deriv_arg: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    First,
    Second,
}

impl HankelKind {
    pub fn from_index(kind: u8) -> Option<Self> {
        match kind {
            1 => Some(HankelKind::First),
            2 => Some(HankelKind::Second),
            _ => None,
        }
    }
}

/// How an evaluation was carried out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalPath {
    DoubleDouble,
    Multiprecision { bits: usize },
    /// Richardson extrapolation around a near-integer order; carries the
    /// difference between the two extrapolation levels.
    NearInteger { error_estimate: f64 },
}

/// Bundle of functions needed by the layered-well matching conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingFunctions {
    /// `H¹_ν` at the exterior argument.
    pub h1: CylinderValue,
    /// `H²_ν` at the exterior argument.
    pub h2: CylinderValue,
    /// The well solution vanishing at the core argument, at the outer argument.
    pub well: CylinderValue,
}

pub(crate) fn check_domain(order: Complex64, arg: Complex64) -> Result<(), CylinderError> {
    let fail = |reason| Err(CylinderError::DomainExceeded { order, arg, reason });
    if !(order.re.is_finite() && order.im.is_finite() && arg.re.is_finite() && arg.im.is_finite()) {
        return fail("non-finite input");
    }
    if arg.norm() > MAX_ARG {
        return fail("|arg| above 60");
    }
    if order.re.abs() > MAX_RE_ORDER {
        return fail("|Re order| above 50");
    }
    if order.im.abs() > MAX_IM_ORDER {
        return fail("|Im order| above 20");
    }
    if arg.re < 0.0 && arg.im == 0.0 {
        return fail("negative real argument");
    }
    Ok(())
}

fn nearest_integer_distance(order: Complex64) -> f64 {
    (order - Complex64::new(order.re.round(), 0.0)).norm()
}

pub fn is_near_integer(order: Complex64) -> bool {
    nearest_integer_distance(order) < NEAR_INTEGER
}

// ---------------------------------------------------------------------------
// Generic kernels

/// `J_ν(z)` and `J'_ν(z)` with absolute round-off bounds.
pub(crate) struct JTerm<T> {
    pub(crate) val: Cx<T>,
    pub(crate) der: Cx<T>,
    pub(crate) err_val: f64,
    pub(crate) err_der: f64,
}

fn j_series<T: Real>(nu: &Cx<T>, z: &Cx<T>, rgamma: Cx<T>) -> JTerm<T> {
    let eps = T::epsilon();
    let w = -(z.clone() * z.clone()).scale_pow2(-2);
    let w_abs = w.norm_f64();
    let mut t = rgamma;
    let mut s0 = t.clone();
    let mut s1 = t.clone() * nu.clone();
    let mut abs0 = t.norm_f64();
    let mut abs1 = s1.norm_f64();
    let nu_c = nu.to_c64();
    for m in 1..4000usize {
        let mf = m as f64;
        let denom = (nu.clone() + Cx::from_f64(mf)).scale(&T::from_f64(mf));
        t = t * w.clone() / denom;
        let weight = nu.clone() + Cx::from_f64(2.0 * mf);
        let t1 = t.clone() * weight;
        let ta = t.norm_f64();
        let t1a = t1.norm_f64();
        s0 = s0 + t.clone();
        s1 = s1 + t1;
        abs0 += ta;
        abs1 += t1a;
        let decreasing = mf * (nu_c + mf).norm() > 2.0 * w_abs;
        if decreasing && ta <= eps * abs0 * 1e-3 && t1a <= eps * abs1 * 1e-3 {
            break;
        }
    }
    let zero_arg = z.is_zero();
    let half_z = z.scale_pow2(-1);
    let log_half_z = half_z.ln();
    let pre = (nu.clone() * log_half_z.clone()).exp();
    let pre_abs = pre.norm_f64();
    // relative error carried by the prefactor and by 1/Γ
    let rel_pre = eps * (8.0 + (nu_c * log_half_z.to_c64()).norm() + 4.0 * nu_c.norm() + 50.0);
    let val = pre.clone() * s0.clone();
    let der = if zero_arg {
        Cx::zero()
    } else {
        pre * s1 / z.clone()
    };
    let z_abs = z.norm_f64();
    let err_val = pre_abs * (eps * 4.0 * abs0) + val.norm_f64() * rel_pre;
    let err_der = if zero_arg {
        0.0
    } else {
        pre_abs / z_abs * (eps * 4.0 * abs1) + der.norm_f64() * rel_pre
    };
    JTerm { val, der, err_val, err_der }
}

/// Order-dependent factors shared by every argument.
pub(crate) struct OrderFactors<T> {
    nu: Cx<T>,
    neg_nu: Cx<T>,
    rg_plus: Cx<T>,
    rg_minus: Cx<T>,
    sin_pi_nu: Cx<T>,
    /// e^{-iπν}
    e_minus: Cx<T>,
    /// e^{+iπν}
    e_plus: Cx<T>,
}

impl<T: Real> OrderFactors<T> {
    pub(crate) fn new(order: Complex64) -> Self {
        let nu = Cx::<T>::from_c64(order);
        let one = Cx::<T>::one();
        let rg_plus = recip_gamma(&(one.clone() + nu.clone()));
        let rg_minus = recip_gamma(&(one - nu.clone()));
        let pi_nu = nu.scale(&T::pi());
        let sin_pi_nu = pi_nu.sin();
        let i_pi_nu = pi_nu.mul_i();
        let e_plus = i_pi_nu.exp();
        let e_minus = (-i_pi_nu).exp();
        OrderFactors { neg_nu: -nu.clone(), nu, rg_plus, rg_minus, sin_pi_nu, e_minus, e_plus }
    }
}

pub(crate) struct PairTerm<T> {
    pub(crate) plus: JTerm<T>,
    pub(crate) minus: JTerm<T>,
}

pub(crate) fn j_pair<T: Real>(f: &OrderFactors<T>, z: &Cx<T>) -> PairTerm<T> {
    PairTerm {
        plus: j_series(&f.nu, z, f.rg_plus.clone()),
        minus: j_series(&f.neg_nu, z, f.rg_minus.clone()),
    }
}

/// Hankel functions from a `J_{±ν}` pair; returns (value, deriv, abs errors).
pub(crate) fn hankel_from_pair<T: Real>(
    f: &OrderFactors<T>,
    p: &PairTerm<T>,
    kind: HankelKind,
) -> (Cx<T>, Cx<T>, f64, f64) {
    let (phase, denom) = match kind {
        HankelKind::First => (f.e_minus.clone(), f.sin_pi_nu.mul_i()),
        HankelKind::Second => (f.e_plus.clone(), -f.sin_pi_nu.mul_i()),
    };
    let phase_abs = phase.norm_f64();
    let den_abs = denom.norm_f64();
    let val = (p.minus.val.clone() - phase.clone() * p.plus.val.clone()) / denom.clone();
    let der = (p.minus.der.clone() - phase * p.plus.der.clone()) / denom;
    let err_val = (p.minus.err_val + phase_abs * p.plus.err_val) / den_abs;
    let err_der = (p.minus.err_der + phase_abs * p.plus.err_der) / den_abs;
    (val, der, err_val, err_der)
}

/// `C(z) = [J_ν(z_c) J_{-ν}(z) - J_{-ν}(z_c) J_ν(z)] / sin πν`, which vanishes
/// at `z = z_c`; returns (value, deriv, abs errors).
pub(crate) fn well_from_pairs<T: Real>(
    f: &OrderFactors<T>,
    core: &PairTerm<T>,
    outer: &PairTerm<T>,
) -> (Cx<T>, Cx<T>, f64, f64) {
    let den_abs = f.sin_pi_nu.norm_f64();
    let a = &core.plus;
    let b = &core.minus;
    let val = (a.val.clone() * outer.minus.val.clone() - b.val.clone() * outer.plus.val.clone())
        / f.sin_pi_nu.clone();
    let der = (a.val.clone() * outer.minus.der.clone() - b.val.clone() * outer.plus.der.clone())
        / f.sin_pi_nu.clone();
    let (av, bv) = (a.val.norm_f64(), b.val.norm_f64());
    let err_val = (av * outer.minus.err_val
        + a.err_val * outer.minus.val.norm_f64()
        + bv * outer.plus.err_val
        + b.err_val * outer.plus.val.norm_f64())
        / den_abs;
    let err_der = (av * outer.minus.err_der
        + a.err_val * outer.minus.der.norm_f64()
        + bv * outer.plus.err_der
        + b.err_val * outer.plus.der.norm_f64())
        / den_abs;
    (val, der, err_val, err_der)
}

pub(crate) fn rel(err: f64, v: &Complex64) -> f64 {
    let n = v.norm();
    if n == 0.0 {
        if err == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        err / n
    }
}

pub(crate) fn cyl<T: Real>(v: &Cx<T>, d: &Cx<T>) -> CylinderValue {
    CylinderValue { value: v.to_c64(), deriv_arg: d.to_c64() }
}

/// An evaluation that can be run at any working precision.
pub(crate) trait Kernel {
    type Out;
    /// Output plus estimated relative error.
    fn run<T: Real>(&self) -> (Self::Out, f64);
}

pub(crate) fn drive<K: Kernel>(k: &K) -> Result<(K::Out, EvalPath), CylinderError> {
    let (out, err) = k.run::<Dd>();
    if err <= INTERNAL_TARGET {
        return Ok((out, EvalPath::DoubleDouble));
    }
    if !err.is_finite() {
        return Err(CylinderError::AccuracyLoss { estimate: err });
    }
    // the double-double estimate can saturate, so widen again if one step is short
    let (mut bits, mut err) = (106, err);
    for _ in 0..3 {
        bits += (err / INTERNAL_TARGET).log2().ceil().max(0.0) as usize + 32;
        if bits > MAX_BITS {
            break;
        }
        let (out, e) = with_precision(bits, || k.run::<Mp>());
        if e <= INTERNAL_TARGET {
            return Ok((out, EvalPath::Multiprecision { bits }));
        }
        if !e.is_finite() {
            return Err(CylinderError::AccuracyLoss { estimate: e });
        }
        err = e;
    }
    Err(CylinderError::AccuracyLoss { estimate: err })
}

pub(crate) fn finite(v: &CylinderValue) -> bool {
    v.value.re.is_finite() && v.value.im.is_finite() && v.deriv_arg.re.is_finite() && v.deriv_arg.im.is_finite()
}

struct JKernel {
    order: Complex64,
    arg: Complex64,
}

impl Kernel for JKernel {
    type Out = CylinderValue;
    fn run<T: Real>(&self) -> (CylinderValue, f64) {
        let nu = Cx::<T>::from_c64(self.order);
        let rg = recip_gamma(&(Cx::one() + nu.clone()));
        let j = j_series(&nu, &Cx::from_c64(self.arg), rg);
        let out = cyl(&j.val, &j.der);
        let err = rel(j.err_val, &out.value).max(if self.arg == Complex64::new(0.0, 0.0) {
            0.0
        } else {
            rel(j.err_der, &out.deriv_arg)
        });
        (out, err)
    }
}

struct HankelKernel {
    order: Complex64,
    arg: Complex64,
}

impl Kernel for HankelKernel {
    type Out = (CylinderValue, CylinderValue);
    fn run<T: Real>(&self) -> (Self::Out, f64) {
        let f = OrderFactors::<T>::new(self.order);
        let p = j_pair(&f, &Cx::from_c64(self.arg));
        let (v1, d1, e1, ed1) = hankel_from_pair(&f, &p, HankelKind::First);
        let (v2, d2, e2, ed2) = hankel_from_pair(&f, &p, HankelKind::Second);
        let h1 = cyl(&v1, &d1);
        let h2 = cyl(&v2, &d2);
        let err = rel(e1, &h1.value)
            .max(rel(ed1, &h1.deriv_arg))
            .max(rel(e2, &h2.value))
            .max(rel(ed2, &h2.deriv_arg));
        ((h1, h2), err)
    }
}

struct MatchingKernel {
    order: Complex64,
    exterior: Complex64,
    core: Complex64,
    outer: Complex64,
}

impl Kernel for MatchingKernel {
    type Out = MatchingFunctions;
    fn run<T: Real>(&self) -> (MatchingFunctions, f64) {
        let f = OrderFactors::<T>::new(self.order);
        let ext = j_pair(&f, &Cx::from_c64(self.exterior));
        let core = j_pair(&f, &Cx::from_c64(self.core));
        let outer = j_pair(&f, &Cx::from_c64(self.outer));
        let (v1, d1, e1, ed1) = hankel_from_pair(&f, &ext, HankelKind::First);
        let (v2, d2, e2, ed2) = hankel_from_pair(&f, &ext, HankelKind::Second);
        let (wv, wd, ew, edw) = well_from_pairs(&f, &core, &outer);
        let out = MatchingFunctions { h1: cyl(&v1, &d1), h2: cyl(&v2, &d2), well: cyl(&wv, &wd) };
        // The well solution may sit near one of its zeros in ν; measure its
        // error against the size of the two products it is built from.
        let well_scale = out.well.value.norm().max(out.well.deriv_arg.norm() * 1e-3);
        let err = rel(e1, &out.h1.value)
            .max(rel(ed1, &out.h1.deriv_arg))
            .max(rel(e2, &out.h2.value))
            .max(rel(ed2, &out.h2.deriv_arg))
            .max(ew / well_scale)
            .max(edw / out.well.deriv_arg.norm().max(well_scale));
        (out, err)
    }
}

// ---------------------------------------------------------------------------
// Near-integer extrapolation

pub(crate) trait Blend: Sized {
    fn blend(a: &Self, wa: f64, b: &Self, wb: f64) -> Self;
    fn size(&self) -> f64;
    fn distance(a: &Self, b: &Self) -> f64;
}

impl Blend for CylinderValue {
    fn blend(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        CylinderValue {
            value: a.value * wa + b.value * wb,
            deriv_arg: a.deriv_arg * wa + b.deriv_arg * wb,
        }
    }
    fn size(&self) -> f64 {
        self.value.norm().max(self.deriv_arg.norm())
    }
    fn distance(a: &Self, b: &Self) -> f64 {
        (a.value - b.value).norm().max((a.deriv_arg - b.deriv_arg).norm())
    }
}

impl Blend for (CylinderValue, CylinderValue) {
    fn blend(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        (Blend::blend(&a.0, wa, &b.0, wb), Blend::blend(&a.1, wa, &b.1, wb))
    }
    fn size(&self) -> f64 {
        self.0.size().max(self.1.size())
    }
    fn distance(a: &Self, b: &Self) -> f64 {
        CylinderValue::distance(&a.0, &b.0).max(CylinderValue::distance(&a.1, &b.1))
    }
}

impl Blend for MatchingFunctions {
    fn blend(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        MatchingFunctions {
            h1: Blend::blend(&a.h1, wa, &b.h1, wb),
            h2: Blend::blend(&a.h2, wa, &b.h2, wb),
            well: Blend::blend(&a.well, wa, &b.well, wb),
        }
    }
    fn size(&self) -> f64 {
        self.h1.size().max(self.h2.size()).max(self.well.size())
    }
    fn distance(a: &Self, b: &Self) -> f64 {
        CylinderValue::distance(&a.h1, &b.h1)
            .max(CylinderValue::distance(&a.h2, &b.h2))
            .max(CylinderValue::distance(&a.well, &b.well))
    }
}

pub(crate) fn with_near_integer<O: Blend>(
    order: Complex64,
    eval: impl Fn(Complex64) -> Result<(O, EvalPath), CylinderError>,
) -> Result<(O, EvalPath), CylinderError> {
    if !is_near_integer(order) {
        return eval(order);
    }
    let h = RICHARDSON_STEP;
    let sym = |step: f64| -> Result<O, CylinderError> {
        let (a, _) = eval(order + step)?;
        let (b, _) = eval(order - step)?;
        Ok(O::blend(&a, 0.5, &b, 0.5))
    };
    let coarse = sym(h)?;
    let fine = sym(0.5 * h)?;
    let out = O::blend(&fine, 4.0 / 3.0, &coarse, -1.0 / 3.0);
    let error_estimate = O::distance(&out, &fine) / out.size().max(1e-300);
    Ok((out, EvalPath::NearInteger { error_estimate }))
}

// ---------------------------------------------------------------------------
// Public API

/// `J_ν(z)` and its argument derivative.
pub fn bessel_j_value(order: Complex64, arg: Complex64) -> Result<CylinderValue, CylinderError> {
    check_domain(order, arg)?;
    if arg == Complex64::new(0.0, 0.0) {
        if order == Complex64::new(0.0, 0.0) {
            return Ok(CylinderValue { value: Complex64::new(1.0, 0.0), deriv_arg: Complex64::new(0.0, 0.0) });
        }
        if order.re > 0.0 {
            return Ok(CylinderValue { value: Complex64::new(0.0, 0.0), deriv_arg: Complex64::new(0.0, 0.0) });
        }
        return Err(CylinderError::DomainExceeded { order, arg, reason: "J_ν(0) unbounded for Re ν <= 0" });
    }
    let (v, _) = drive(&JKernel { order, arg })?;
    if !finite(&v) {
        return Err(CylinderError::DomainExceeded { order, arg, reason: "result not representable" });
    }
    Ok(v)
}

/// `J_ν(z)`, principal branch.
pub fn bessel_j(order: Complex64, arg: Complex64) -> Result<Complex64, CylinderError> {
    Ok(bessel_j_value(order, arg)?.value)
}

/// Both Hankel functions at once, with the evaluation path used.
pub fn hankel_pair_diag(
    order: Complex64,
    arg: Complex64,
) -> Result<((CylinderValue, CylinderValue), EvalPath), CylinderError> {
    check_domain(order, arg)?;
    if arg.norm() == 0.0 {
        return Err(CylinderError::DomainExceeded { order, arg, reason: "Hankel functions are singular at 0" });
    }
    let (v, path) = with_near_integer(order, |nu| drive(&HankelKernel { order: nu, arg }))?;
    if !finite(&v.0) || !finite(&v.1) {
        return Err(CylinderError::DomainExceeded { order, arg, reason: "result not representable" });
    }
    Ok((v, path))
}

pub fn hankel_pair(order: Complex64, arg: Complex64) -> Result<(CylinderValue, CylinderValue), CylinderError> {
    Ok(hankel_pair_diag(order, arg)?.0)
}

/// `H^{(kind)}_ν(z)` and its argument derivative.
pub fn hankel(kind: HankelKind, order: Complex64, arg: Complex64) -> Result<CylinderValue, CylinderError> {
    let (h1, h2) = hankel_pair(order, arg)?;
    Ok(match kind {
        HankelKind::First => h1,
        HankelKind::Second => h2,
    })
}

/// `d/dr ln H^{(kind)}_ν(k r) = k H'(kr) / H(kr)`.
pub fn log_deriv_hankel(
    kind: HankelKind,
    order: Complex64,
    wavenumber: Complex64,
    r: f64,
) -> Result<Complex64, CylinderError> {
    let arg = wavenumber * r;
    let h = hankel(kind, order, arg)?;
    if h.value.norm() == 0.0 {
        return Err(CylinderError::ZeroDenominator { order, arg });
    }
    Ok(wavenumber * h.deriv_arg / h.value)
}

/// Hankel functions at `exterior` and the core-vanishing well solution at
/// `outer`, all of one order, from a single shared evaluation.
pub fn matching_functions(
    order: Complex64,
    exterior: Complex64,
    core: Complex64,
    outer: Complex64,
) -> Result<(MatchingFunctions, EvalPath), CylinderError> {
    for z in [exterior, core, outer] {
        check_domain(order, z)?;
        if z.norm() == 0.0 {
            return Err(CylinderError::DomainExceeded { order, arg: z, reason: "zero argument" });
        }
    }
    let (v, path) = with_near_integer(order, |nu| drive(&MatchingKernel { order: nu, exterior, core, outer }))?;
    if !finite(&v.h1) || !finite(&v.h2) || !finite(&v.well) {
        return Err(CylinderError::DomainExceeded { order, arg: exterior, reason: "result not representable" });
    }
    Ok((v, path))
}

/// The core-vanishing well solution `C(z)` and `C'(z)`.
pub fn well_solution(order: Complex64, core: Complex64, outer: Complex64) -> Result<CylinderValue, CylinderError> {
    Ok(matching_functions(order, outer, core, outer)?.0.well)
}
