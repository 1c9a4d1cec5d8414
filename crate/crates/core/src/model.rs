//! The layered potential: hard core at `R - d`, a square well of depth `V`
//! out to `R`, and a δ-shell of strength `Ω` at `R`.
//!
//! With `C(z)` the Bessel combination that vanishes on the core, the radial
//! solution is `√r C(qr)` inside and `√r [H²(kr) + S H¹(kr)]` outside. The
//! derivative jumps by `2Ω u(R)` across the shell. Matching gives
//!
//! ```text
//! S = -D₂ / D₁,   D_i = k H_i'(kR) C(qR) - q C'(qR) H_i(kR) - 2Ω H_i(kR) C(qR)
//! ```
//!
//! `D_i = H_i C Δ_i`, where `Δ_i` is the difference of logarithmic
//! derivatives. Unlike `Δ_i`, `D_i` is entire in `λ`, so root finding and
//! residues work with it directly.

use num_complex::Complex64;
use thiserror::Error;

use crate::arith::{Cx, Real};
use crate::cylinder::{
    self, check_domain, cyl, drive, finite, hankel_from_pair, j_pair, rel, well_from_pairs,
    with_near_integer, Blend, CylinderError, CylinderValue, EvalPath, HankelKind, Kernel,
    OrderFactors,
};

/// `|D₁|` below this fraction of its term scale counts as sitting on a pole.
pub const POLE_THRESHOLD: f64 = 1e-8;
const RESIDUE_STEP: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid potential parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Cylinder(#[from] CylinderError),
    #[error("S-matrix evaluated at a pole (|D1|/scale = {ratio:e}) at lambda = {lambda}")]
    AtPole { lambda: Complex64, ratio: f64 },
    #[error("lambda = {lambda} is not a pole (|D1|/scale = {ratio:e})")]
    NotAPole { lambda: Complex64, ratio: f64 },
    #[error("degenerate pole at lambda = {lambda}: dD1/dlambda vanishes")]
    DegeneratePole { lambda: Complex64 },
    #[error("interior solution vanishes at r = R for lambda = {lambda}")]
    ZeroDenominator { lambda: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    /// Well depth.
    pub v: f64,
    /// Outer radius.
    pub r: f64,
    /// Well width; the hard core has radius `r - d`.
    pub d: f64,
    /// δ-shell strength.
    pub omega: f64,
}

impl PotentialParams {
    pub fn new(v: f64, r: f64, d: f64, omega: f64) -> Result<Self, ModelError> {
        let p = PotentialParams { v, r, d, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidParams(m));
        if ![self.v, self.r, self.d, self.omega].iter().all(|x| x.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.v < 0.0 {
            return bad(format!("V = {} must be >= 0", self.v));
        }
        if self.r <= 0.0 {
            return bad(format!("R = {} must be > 0", self.r));
        }
        if self.d <= 0.0 || self.d >= self.r {
            return bad(format!("d = {} must lie in (0, R = {})", self.d, self.r));
        }
        Ok(())
    }

    pub fn core_radius(&self) -> f64 {
        self.r - self.d
    }

    /// Bound-correlated case: `R²V = 165`, `ΩR = 0.5`, `d/R = 0.29`.
    pub fn fig2() -> Self {
        PotentialParams { v: 165.0, r: 1.0, d: 0.29, omega: 0.5 }
    }

    /// Metastable-correlated case: as [`fig2`](Self::fig2) with `ΩR = 32.5`.
    pub fn fig3() -> Self {
        PotentialParams { omega: 32.5, ..Self::fig2() }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        PotentialParams { omega, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// `Im k >= 0`.
    Physical,
    /// `Im k <= 0`, where resonances live.
    Continued,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelKinematics {
    pub e: Complex64,
    pub k: Complex64,
    pub q: Complex64,
    pub sheet: Sheet,
}

/// Wavenumbers for energy `e` with `k` on the requested sheet.
pub fn kinematics(params: &PotentialParams, e: Complex64, sheet: Sheet) -> ChannelKinematics {
    let mut k = (2.0 * e).sqrt();
    let flip = match sheet {
        Sheet::Physical => k.im < 0.0,
        Sheet::Continued => k.im > 0.0,
    };
    if flip {
        k = -k;
    }
    from_wavenumber(params, k)
}

/// Kinematics for a given exterior wavenumber; the sheet follows `Im k`.
pub fn from_wavenumber(params: &PotentialParams, k: Complex64) -> ChannelKinematics {
    let k2 = k * k;
    let q = (k2 + 2.0 * params.v).sqrt();
    let sheet = if k.im >= 0.0 { Sheet::Physical } else { Sheet::Continued };
    ChannelKinematics { e: 0.5 * k2, k, q, sheet }
}

/// Real positive energy on the physical sheet.
pub fn kinematics_real(params: &PotentialParams, e: f64) -> ChannelKinematics {
    kinematics(params, Complex64::new(e, 0.0), Sheet::Physical)
}

/// Everything the matching conditions produce at one `(E, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matching {
    pub h1: CylinderValue,
    pub h2: CylinderValue,
    pub well: CylinderValue,
    pub d1: Complex64,
    pub d2: Complex64,
    /// Sum of the magnitudes of the three terms of `D₁`.
    pub scale1: f64,
    pub scale2: f64,
    pub path: EvalPath,
}

impl Matching {
    pub fn s(&self) -> Complex64 {
        -self.d2 / self.d1
    }

    /// `|D₁|` relative to its term scale.
    pub fn pole_ratio(&self) -> f64 {
        self.d1.norm() / self.scale1
    }

    pub fn delta1(&self) -> Complex64 {
        self.d1 / (self.h1.value * self.well.value)
    }

    pub fn delta2(&self) -> Complex64 {
        self.d2 / (self.h2.value * self.well.value)
    }
}

struct DetOut {
    h1: CylinderValue,
    h2: CylinderValue,
    well: CylinderValue,
    d1: Complex64,
    d2: Complex64,
    scale1: f64,
    scale2: f64,
}

impl Blend for DetOut {
    fn blend(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        DetOut {
            h1: Blend::blend(&a.h1, wa, &b.h1, wb),
            h2: Blend::blend(&a.h2, wa, &b.h2, wb),
            well: Blend::blend(&a.well, wa, &b.well, wb),
            d1: a.d1 * wa + b.d1 * wb,
            d2: a.d2 * wa + b.d2 * wb,
            scale1: a.scale1 * wa.abs() + b.scale1 * wb.abs(),
            scale2: a.scale2 * wa.abs() + b.scale2 * wb.abs(),
        }
    }
    fn size(&self) -> f64 {
        self.scale1.max(self.scale2)
    }
    fn distance(a: &Self, b: &Self) -> f64 {
        (a.d1 - b.d1).norm().max((a.d2 - b.d2).norm())
    }
}

struct DetKernel {
    order: Complex64,
    k: Complex64,
    q: Complex64,
    r: f64,
    a: f64,
    omega: f64,
}

impl Kernel for DetKernel {
    type Out = DetOut;
    fn run<T: Real>(&self) -> (DetOut, f64) {
        let f = OrderFactors::<T>::new(self.order);
        let k = Cx::<T>::from_c64(self.k);
        let q = Cx::<T>::from_c64(self.q);
        let rr = T::from_f64(self.r);
        let ext = j_pair(&f, &k.scale(&rr));
        let core = j_pair(&f, &q.scale(&T::from_f64(self.a)));
        let outer = j_pair(&f, &q.scale(&rr));
        let (h1, h1d, e1, e1d) = hankel_from_pair(&f, &ext, HankelKind::First);
        let (h2, h2d, e2, e2d) = hankel_from_pair(&f, &ext, HankelKind::Second);
        let (c, cd, ec, ecd) = well_from_pairs(&f, &core, &outer);
        let two_omega = Cx::<T>::from_f64(2.0 * self.omega);
        let (kc, qa, om) = (self.k.norm(), self.q.norm(), 2.0 * self.omega.abs());
        let (ca, cda) = (c.norm_f64(), cd.norm_f64());
        let det = |h: &Cx<T>, hd: &Cx<T>, eh: f64, ehd: f64| {
            let t1 = k.clone() * hd.clone() * c.clone();
            let t2 = q.clone() * cd.clone() * h.clone();
            let t3 = two_omega.clone() * h.clone() * c.clone();
            let scale = t1.norm_f64() + t2.norm_f64() + t3.norm_f64();
            let (ha, hda) = (h.norm_f64(), hd.norm_f64());
            let err = kc * (ehd * ca + hda * ec) + qa * (ecd * ha + cda * eh) + om * (eh * ca + ha * ec);
            ((t1 - t2 - t3).to_c64(), scale, err)
        };
        let (d1, scale1, err1) = det(&h1, &h1d, e1, e1d);
        let (d2, scale2, err2) = det(&h2, &h2d, e2, e2d);
        let out = DetOut {
            h1: cyl(&h1, &h1d),
            h2: cyl(&h2, &h2d),
            well: cyl(&c, &cd),
            d1,
            d2,
            scale1,
            scale2,
        };
        let err = (err1 / scale1)
            .max(err2 / scale2)
            .max(rel(e1, &out.h1.value))
            .max(rel(e2, &out.h2.value));
        (out, err)
    }
}

/// Evaluate the matching conditions at `(kin, λ)`.
pub fn matching(params: &PotentialParams, kin: &ChannelKinematics, lambda: Complex64) -> Result<Matching, ModelError> {
    let a = params.core_radius();
    let ext = kin.k * params.r;
    let core = kin.q * a;
    let outer = kin.q * params.r;
    for z in [ext, core, outer] {
        check_domain(lambda, z)?;
        if z.norm() == 0.0 {
            return Err(CylinderError::DomainExceeded { order: lambda, arg: z, reason: "zero argument" }.into());
        }
    }
    let kernel = |nu: Complex64| {
        drive(&DetKernel { order: nu, k: kin.k, q: kin.q, r: params.r, a, omega: params.omega })
    };
    let (out, path) = with_near_integer(lambda, kernel)?;
    let ok = finite(&out.h1) && finite(&out.h2) && finite(&out.well);
    if !ok || !(out.d1.norm().is_finite() && out.d2.norm().is_finite() && out.scale1 > 0.0) {
        return Err(CylinderError::DomainExceeded { order: lambda, arg: ext, reason: "result not representable" }.into());
    }
    Ok(Matching {
        h1: out.h1,
        h2: out.h2,
        well: out.well,
        d1: out.d1,
        d2: out.d2,
        scale1: out.scale1,
        scale2: out.scale2,
        path,
    })
}

/// `q C'(qR) / C(qR)`: the logarithmic derivative at `R` of the interior
/// solution that vanishes on the core, without the `√r` factor.
pub fn interior_logderiv(params: &PotentialParams, kin: &ChannelKinematics, lambda: Complex64) -> Result<Complex64, ModelError> {
    let w = cylinder::well_solution(lambda, kin.q * params.core_radius(), kin.q * params.r)?;
    if w.value.norm() == 0.0 {
        return Err(ModelError::ZeroDenominator { lambda });
    }
    Ok(kin.q * w.deriv_arg / w.value)
}

/// `(Δ₁, Δ₂)` with `Δ_i = k H_i'/H_i - q C'/C - 2Ω` at `r = R`.
pub fn delta_functions(params: &PotentialParams, kin: &ChannelKinematics, lambda: Complex64) -> Result<(Complex64, Complex64), ModelError> {
    let m = matching(params, kin, lambda)?;
    if m.well.value.norm() == 0.0 {
        return Err(ModelError::ZeroDenominator { lambda });
    }
    Ok((m.delta1(), m.delta2()))
}

/// `S(k, λ)`.
pub fn s_matrix(params: &PotentialParams, kin: &ChannelKinematics, lambda: Complex64) -> Result<Complex64, ModelError> {
    let m = matching(params, kin, lambda)?;
    let ratio = m.pole_ratio();
    // S is unimodular for real λ at real E > 0, so a small D₁ there only
    // means a very narrow pole nearby.
    let unitary = lambda.im == 0.0 && kin.e.im == 0.0 && kin.e.re > 0.0 && kin.k.im == 0.0;
    if ratio < POLE_THRESHOLD && !unitary {
        return Err(ModelError::AtPole { lambda, ratio });
    }
    Ok(m.s())
}

/// `S` at real energy `e`, physical sheet.
pub fn s_matrix_real(params: &PotentialParams, e: f64, lambda: Complex64) -> Result<Complex64, ModelError> {
    s_matrix(params, &kinematics_real(params, e), lambda)
}

/// `S = -H²(kρ)/H¹(kρ)` for an impenetrable sphere of radius `radius`.
pub fn hard_sphere_s_matrix(k: Complex64, radius: f64, lambda: Complex64) -> Result<Complex64, ModelError> {
    let (h1, h2) = cylinder::hankel_pair(lambda, k * radius)?;
    if h1.value.norm() == 0.0 {
        return Err(ModelError::AtPole { lambda, ratio: 0.0 });
    }
    Ok(-h2.value / h1.value)
}

/// Central difference with one Richardson refinement.
pub fn richardson_derivative<E>(
    f: impl Fn(Complex64) -> Result<Complex64, E>,
    x: Complex64,
    h: f64,
) -> Result<Complex64, E> {
    let central = |h: f64| -> Result<Complex64, E> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `dD₁/dλ` at fixed energy.
pub fn d1_lambda_derivative(params: &PotentialParams, kin: &ChannelKinematics, lambda: Complex64, h: f64) -> Result<Complex64, ModelError> {
    richardson_derivative(|l| matching(params, kin, l).map(|m| m.d1), lambda, h)
}

/// Residue `ρ = lim (λ - λ̃) S` at a pole `λ̃`.
pub fn residue(params: &PotentialParams, kin: &ChannelKinematics, lambda_pole: Complex64) -> Result<Complex64, ModelError> {
    let m = matching(params, kin, lambda_pole)?;
    let ratio = m.pole_ratio();
    if ratio > POLE_THRESHOLD {
        return Err(ModelError::NotAPole { lambda: lambda_pole, ratio });
    }
    let h = RESIDUE_STEP * lambda_pole.norm().max(1.0);
    let slope = d1_lambda_derivative(params, kin, lambda_pole, h)?;
    if slope.norm() * lambda_pole.norm().max(1.0) < 1e-6 * m.scale1 {
        return Err(ModelError::DegeneratePole { lambda: lambda_pole });
    }
    Ok(-m.d2 / slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        assert!(PotentialParams::new(165.0, 1.0, 1.0, 0.5).is_err());
        assert!(PotentialParams::new(-1.0, 1.0, 0.5, 0.5).is_err());
        assert!(PotentialParams::new(165.0, 1.0, 0.29, 0.5).is_ok());
    }

    #[test]
    fn kinematics_examples() {
        let p0 = PotentialParams { v: 0.0, ..PotentialParams::fig2() };
        let kin = kinematics_real(&p0, 0.5);
        assert!((kin.k - c(1.0, 0.0)).norm() < 1e-15 && (kin.q - c(1.0, 0.0)).norm() < 1e-15);
        let p = PotentialParams::fig2();
        let kin = kinematics_real(&p, 2.0);
        assert!((kin.k - c(2.0, 0.0)).norm() < 1e-15);
        assert!((kin.q.re - 334f64.sqrt()).abs() < 1e-13);
        let kin = kinematics(&p, c(-1.0, 0.0), Sheet::Physical);
        assert!((kin.k - c(0.0, 2f64.sqrt())).norm() < 1e-15);
        assert!((kin.q.re - 328f64.sqrt()).abs() < 1e-13);
        let kin = kinematics(&p, c(3.0, -0.1), Sheet::Continued);
        assert!(kin.k.im < 0.0 && kin.sheet == Sheet::Continued);
        assert!((kin.k * kin.k - 2.0 * kin.e).norm() < 1e-14);
    }

    #[test]
    fn half_integer_interior_closed_form() {
        let p = PotentialParams::fig2();
        let kin = kinematics_real(&p, 2.0);
        let q = kin.q.re;
        let got = interior_logderiv(&p, &kin, c(0.5, 0.0)).unwrap();
        let want = q / (q * p.d).tan() - 0.5 / p.r;
        assert!((got - c(want, 0.0)).norm() < 1e-11 * want.abs());
    }

    #[test]
    fn free_hard_sphere_limit() {
        let p = PotentialParams { v: 0.0, r: 1.0, d: 0.29, omega: 0.0 };
        let s = s_matrix_real(&p, 0.5, c(0.5, 0.0)).unwrap();
        let want = c(0.0, -1.42).exp();
        assert!((s - want).norm() < 1e-12, "{s}");
        assert!((want - c(0.150226, -0.988652)).norm() < 1e-6);
    }

    #[test]
    fn impenetrable_shell_limit() {
        let p = PotentialParams::fig2().with_omega(1e8);
        let s = s_matrix_real(&p, 0.5, c(0.5, 0.0)).unwrap();
        assert!((s - c(0.0, -2.0).exp()).norm() < 1e-6, "{s}");
    }

    #[test]
    fn delta_functions_match_determinants() {
        let p = PotentialParams::fig3();
        let kin = kinematics_real(&p, 2.0);
        let (d1, d2) = delta_functions(&p, &kin, c(1.7, 0.3)).unwrap();
        let h1 = crate::cylinder::hankel(HankelKind::First, c(1.7, 0.3), kin.k * p.r).unwrap();
        let h2 = crate::cylinder::hankel(HankelKind::Second, c(1.7, 0.3), kin.k * p.r).unwrap();
        let l = interior_logderiv(&p, &kin, c(1.7, 0.3)).unwrap();
        let w1 = kin.k * h1.deriv_arg / h1.value - l - 2.0 * p.omega;
        let w2 = kin.k * h2.deriv_arg / h2.value - l - 2.0 * p.omega;
        assert!((d1 - w1).norm() < 1e-10 * w1.norm());
        assert!((d2 - w2).norm() < 1e-10 * w2.norm());
        let s = s_matrix(&p, &kin, c(1.7, 0.3)).unwrap();
        let want = -(h2.value / h1.value) * d2 / d1;
        assert!((s - want).norm() < 1e-10 * want.norm());
    }

    #[test]
    fn unitarity_and_reflection() {
        let p = PotentialParams::fig3();
        let kin = kinematics_real(&p, 8.0);
        for &l in &[0.5, 1.7, 6.5, 15.5] {
            let s = s_matrix(&p, &kin, c(l, 0.0)).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-11, "{l}: {s}");
        }
        let l = c(2.3, 0.6);
        let s = s_matrix(&p, &kin, l).unwrap();
        let sm = s_matrix(&p, &kin, -l).unwrap();
        let want = (c(0.0, -2.0 * std::f64::consts::PI) * l).exp() * s;
        assert!((sm - want).norm() < 1e-10 * want.norm());
        let sc = s_matrix(&p, &kin, l.conj()).unwrap();
        assert!((s * sc.conj() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn residue_rejects_non_pole() {
        let p = PotentialParams::fig2();
        let kin = kinematics_real(&p, 2.0);
        assert!(matches!(residue(&p, &kin, c(1.5, 0.2)), Err(ModelError::NotAPole { .. })));
    }
}
