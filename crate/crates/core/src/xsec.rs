//! Integral cross section from partial waves, and its decomposition into a
//! real-axis integral, Regge-pole terms and an imaginary-axis correction:
//!
//! ```text
//! σ = σ₁ + σ_res + σ₂            (original)
//! σ = σ₁' + σ_res' + σ₂          (n = 0 rotation moved into the pole part)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{self, kinematics_real, ModelError, PotentialParams};
use crate::poles::{scan_poles_nudged, PoleError, ReggePole, Region};
use crate::quad::{breakpoints, integrate, QuadOptions};

const TAIL_RUN: usize = 5;
const MAX_PARTIAL_WAVES: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XsecError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error("{what}: quadrature did not converge (estimate {value}, error bound {error:e})")]
    Quadrature { what: &'static str, value: f64, error: f64 },
    #[error("pole at lambda = {lambda} has Im <= 0; its rotation series diverges")]
    DivergentPole { lambda: Complex64 },
    #[error("energy {0} must be positive")]
    NonPositiveEnergy(f64),
    #[error("partial-wave sum did not reach the tail tolerance within {0} terms")]
    TailNotReached(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XsecSettings {
    /// Partial-wave truncation: stop after 5 consecutive `|1 - S|` below this.
    pub tail_tol: f64,
    /// Absolute tolerance of the real-axis integrals.
    pub quad_tol: f64,
    /// Poles with `Im λ̃` at or above this are left out.
    pub pole_im_cutoff: f64,
    /// Poles below this have their `n = 0` term moved from `σ₁` to the
    /// resonance part in the modified decomposition. Broad background poles
    /// above it stay with `σ₁`.
    pub modified_im_cutoff: f64,
    /// Upper limit of the imaginary-axis integral, in `Im λ`.
    pub sigma2_t_max: f64,
    /// Number of rotation terms `n = 0..rotations` kept per pole.
    pub rotations: u32,
}

impl Default for XsecSettings {
    fn default() -> Self {
        XsecSettings { tail_tol: 1e-13, quad_tol: 1e-9, pole_im_cutoff: 3.0, modified_im_cutoff: 3.0, sigma2_t_max: 12.0, rotations: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationTerm {
    /// Index into the pole list the decomposition was built from.
    pub pole: usize,
    pub n: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulhollandDecomposition {
    pub e: f64,
    pub sigma_total: f64,
    pub sigma1: f64,
    pub sigma_res: f64,
    pub sigma2: f64,
    pub sigma1_mod: f64,
    pub sigma_res_mod: f64,
    /// `Σ σ_res⁽⁰⁾` over the poles moved in the modified decomposition.
    pub n0_moved: f64,
    pub per_n: Vec<RotationTerm>,
    pub closure_defect: f64,
}

impl MulhollandDecomposition {
    /// `Σ_poles σ_res⁽ⁿ⁾`.
    pub fn rotation_sum(&self, n: u32) -> f64 {
        self.per_n.iter().filter(|t| t.n == n).map(|t| t.value).sum()
    }

    pub fn relative_closure_defect(&self) -> f64 {
        self.closure_defect.abs() / self.sigma_total.abs().max(1e-300)
    }
}

fn wavenumber(e: f64) -> Result<f64, XsecError> {
    if e.is_nan() || e <= 0.0 {
        return Err(XsecError::NonPositiveEnergy(e));
    }
    Ok((2.0 * e).sqrt())
}

/// `Λmax = kR + 10 + 5 (kR)^{1/3}`.
pub fn lambda_max(params: &PotentialParams, e: f64) -> f64 {
    let kr = (2.0 * e).sqrt() * params.r;
    kr + 10.0 + 5.0 * kr.cbrt()
}

fn partial_wave_sum(
    s_of: impl Fn(f64) -> Result<Complex64, ModelError>,
    k: f64,
    tail_tol: f64,
    squared: bool,
) -> Result<f64, XsecError> {
    let mut sum = 0.0;
    let mut quiet = 0;
    for j in 0..MAX_PARTIAL_WAVES {
        let s = s_of(j as f64 + 0.5)?;
        let t = Complex64::new(1.0, 0.0) - s;
        sum += (2 * j + 1) as f64 * if squared { 0.5 * t.norm_sqr() } else { t.re };
        if t.norm() < tail_tol {
            quiet += 1;
            if quiet >= TAIL_RUN {
                return Ok(2.0 * PI / (k * k) * sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(XsecError::TailNotReached(MAX_PARTIAL_WAVES))
}

/// `σ = (2π/k²) Σ_J (2J+1) Re[1 - S(k, J+1/2)]`.
pub fn sigma_total_pw(params: &PotentialParams, e: f64, tail_tol: f64) -> Result<f64, XsecError> {
    let k = wavenumber(e)?;
    let kin = kinematics_real(params, e);
    partial_wave_sum(|l| model::s_matrix(params, &kin, Complex64::new(l, 0.0)), k, tail_tol, false)
}

/// The same sum written as `(π/k²) Σ (2J+1) |1 - S|²`.
pub fn sigma_total_pw_squared(params: &PotentialParams, e: f64, tail_tol: f64) -> Result<f64, XsecError> {
    let k = wavenumber(e)?;
    let kin = kinematics_real(params, e);
    partial_wave_sum(|l| model::s_matrix(params, &kin, Complex64::new(l, 0.0)), k, tail_tol, true)
}

/// Partial-wave cross section of an impenetrable sphere of radius `R`.
pub fn sigma_hard_sphere(params: &PotentialParams, e: f64, tail_tol: f64) -> Result<f64, XsecError> {
    let k = wavenumber(e)?;
    let kc = Complex64::new(k, 0.0);
    partial_wave_sum(|l| model::hard_sphere_s_matrix(kc, params.r, Complex64::new(l, 0.0)), k, tail_tol, false)
}

/// `σ₁ = (4π/k²) ∫₀^∞ Re[1 - S(k, λ)] λ dλ`, truncated at `Λmax`.
pub fn sigma1(params: &PotentialParams, e: f64, poles: &[ReggePole], settings: &XsecSettings) -> Result<f64, XsecError> {
    let k = wavenumber(e)?;
    let kin = kinematics_real(params, e);
    let lmax = lambda_max(params, e);
    let extra = poles
        .iter()
        .filter(|p| p.lambda.im < 0.5)
        .flat_map(|p| [p.lambda.re - 3.0 * p.lambda.im, p.lambda.re, p.lambda.re + 3.0 * p.lambda.im]);
    let mut breaks = breakpoints(0.0, lmax, extra.chain((1..lmax as usize).map(|i| i as f64 * 2.0)));
    breaks.dedup();
    let f = |l: f64| -> Result<Complex64, ModelError> {
        let s = model::s_matrix(params, &kin, Complex64::new(l, 0.0))?;
        Ok(Complex64::new((1.0 - s.re) * l, 0.0))
    };
    let opts = QuadOptions { abs_tol: settings.quad_tol * k * k / (4.0 * PI), rel_tol: 1e-13, max_intervals: 4000 };
    let r = integrate(f, &breaks, opts)?;
    let value = 4.0 * PI / (k * k) * r.value.re;
    if !r.converged {
        return Err(XsecError::Quadrature { what: "sigma1", value, error: 4.0 * PI / (k * k) * r.error });
    }
    Ok(value)
}

/// Contribution of the `n`-th rotation of the creeping wave around the core.
pub fn sigma_res_n(k: f64, pole: &ReggePole, n: u32) -> f64 {
    let l = pole.lambda;
    let phase = (Complex64::new(0.0, PI * n as f64) * (2.0 * l + 1.0)).exp();
    8.0 * PI * PI / (k * k) * (l * pole.residue * phase).im
}

fn check_poles(poles: &[ReggePole]) -> Result<(), XsecError> {
    match poles.iter().find(|p| p.lambda.im <= 0.0) {
        Some(p) => Err(XsecError::DivergentPole { lambda: p.lambda }),
        None => Ok(()),
    }
}

/// `σ_res = Σ_{n≥1} σ_res⁽ⁿ⁾ = -(8π²/k²) Σ_poles Im[λ̃ρ / (1 + e^{-2πiλ̃})]`.
pub fn sigma_res(k: f64, poles: &[ReggePole]) -> Result<f64, XsecError> {
    check_poles(poles)?;
    Ok(poles
        .iter()
        .map(|p| {
            let x = (Complex64::new(0.0, -2.0 * PI) * p.lambda).exp();
            -8.0 * PI * PI / (k * k) * (p.lambda * p.residue / (1.0 + x)).im
        })
        .sum())
}

/// `σ_res' = Σ_{n≥0} σ_res⁽ⁿ⁾ = (8π²/k²) Σ_poles Im[λ̃ρ / (1 + e^{2πiλ̃})]`.
pub fn sigma_res_mod(k: f64, poles: &[ReggePole]) -> Result<f64, XsecError> {
    check_poles(poles)?;
    Ok(poles
        .iter()
        .map(|p| {
            let x = (Complex64::new(0.0, 2.0 * PI) * p.lambda).exp();
            8.0 * PI * PI / (k * k) * (p.lambda * p.residue / (1.0 + x)).im
        })
        .sum())
}

/// Imaginary-axis correction,
/// `σ₂ = (8π/k²) ∫₀^∞ t Re[1/(1 + e^{2πt}) - S(k, it)/2] dt`,
/// which is the symmetrised form with `S(-λ) = e^{-2πiλ} S(λ)` folded in.
pub fn sigma2(params: &PotentialParams, e: f64, settings: &XsecSettings) -> Result<f64, XsecError> {
    let k = wavenumber(e)?;
    let kin = kinematics_real(params, e);
    let tmax = settings.sigma2_t_max;
    let f = |t: f64| -> Result<Complex64, ModelError> {
        let s = model::s_matrix(params, &kin, Complex64::new(0.0, t))?;
        let w = 1.0 / (1.0 + (2.0 * PI * t).exp());
        Ok(Complex64::new(t * (w - 0.5 * s.re), 0.0))
    };
    let breaks = breakpoints(0.0, tmax, [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0]);
    let opts = QuadOptions { abs_tol: 0.1 * settings.quad_tol * k * k / (8.0 * PI), rel_tol: 1e-13, max_intervals: 2000 };
    let r = integrate(f, &breaks, opts)?;
    let value = 8.0 * PI / (k * k) * r.value.re;
    if !r.converged {
        return Err(XsecError::Quadrature { what: "sigma2", value, error: 8.0 * PI / (k * k) * r.error });
    }
    Ok(value)
}

/// Both decompositions at energy `e` from a given pole list.
pub fn modified_decomposition(
    params: &PotentialParams,
    e: f64,
    poles: &[ReggePole],
    settings: &XsecSettings,
) -> Result<MulhollandDecomposition, XsecError> {
    let k = wavenumber(e)?;
    let sigma_total = sigma_total_pw(params, e, settings.tail_tol)?;
    let sigma1 = sigma1(params, e, poles, settings)?;
    let sigma2 = sigma2(params, e, settings)?;
    let sigma_res = sigma_res(k, poles)?;
    let per_n: Vec<RotationTerm> = poles
        .iter()
        .enumerate()
        .flat_map(|(i, p)| (0..settings.rotations).map(move |n| RotationTerm { pole: i, n, value: sigma_res_n(k, p, n) }))
        .collect();
    let (moved, kept): (Vec<ReggePole>, Vec<ReggePole>) =
        poles.iter().partition(|p| p.lambda.im < settings.modified_im_cutoff);
    let n0_moved: f64 = moved.iter().map(|p| sigma_res_n(k, p, 0)).sum();
    let sigma1_mod = sigma1 - n0_moved;
    let sigma_res_mod = sigma_res_mod(k, &moved)? + self::sigma_res(k, &kept)?;
    Ok(MulhollandDecomposition {
        e,
        sigma_total,
        sigma1,
        sigma_res,
        sigma2,
        sigma1_mod,
        sigma_res_mod,
        n0_moved,
        per_n,
        closure_defect: sigma_total - (sigma1 + sigma_res + sigma2),
    })
}

/// The poles whose `n = 0` term the modified decomposition moves.
pub fn moved_poles(poles: &[ReggePole], settings: &XsecSettings) -> Vec<ReggePole> {
    poles.iter().copied().filter(|p| p.lambda.im < settings.modified_im_cutoff).collect()
}

/// Region holding every pole that matters for the decomposition at `e`.
pub fn decomposition_region(params: &PotentialParams, e: f64, settings: &XsecSettings) -> Region {
    Region::new(0.0, lambda_max(params, e) + 2.0, -0.01, settings.pole_im_cutoff)
}

/// Poles of `S` with `0 < Im λ̃ < cutoff` and `Re λ̃` in `[0, Λmax + 2]`.
/// The scan region is nudged up to three times if a pole sits on its edge.
pub fn relevant_poles(params: &PotentialParams, e: f64, settings: &XsecSettings) -> Result<Vec<ReggePole>, XsecError> {
    let scan = scan_poles_nudged(params, e, decomposition_region(params, e, settings), 3)?;
    Ok(scan.poles.into_iter().filter(|p| p.lambda.im > 0.0 && p.lambda.im < settings.pole_im_cutoff).collect())
}

/// Scan for poles, then decompose.
pub fn decompose(params: &PotentialParams, e: f64, settings: &XsecSettings) -> Result<(MulhollandDecomposition, Vec<ReggePole>), XsecError> {
    let poles = relevant_poles(params, e, settings)?;
    let d = modified_decomposition(params, e, &poles, settings)?;
    Ok((d, poles))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pole(l: Complex64, r: Complex64) -> ReggePole {
        ReggePole { e: 1.0, lambda: l, residue: r }
    }

    #[test]
    fn n0_term() {
        let p = pole(Complex64::new(2.0, 0.3), Complex64::new(0.1, -0.4));
        let k = 2.0;
        let want = 8.0 * PI * PI / 4.0 * (p.lambda * p.residue).im;
        assert!((sigma_res_n(k, &p, 0) - want).abs() < 1e-14);
    }

    #[test]
    fn rotation_series_sums_to_closed_form() {
        let p = pole(Complex64::new(4.2, 0.15), Complex64::new(-0.3, 0.2));
        let k = 3.0;
        let closed = sigma_res(k, &[p]).unwrap();
        let partial: f64 = (1..200).map(|n| sigma_res_n(k, &p, n)).sum();
        assert!((closed - partial).abs() < 1e-12 * closed.abs().max(1.0));
        let modified = sigma_res_mod(k, &[p]).unwrap();
        assert!((modified - closed - sigma_res_n(k, &p, 0)).abs() < 1e-12 * modified.abs().max(1.0));
    }

    #[test]
    fn rotation_damping_modulus() {
        let p = pole(Complex64::new(1.3, 0.4), Complex64::new(1.0, 0.0));
        let ratio = (Complex64::new(0.0, PI) * (2.0 * p.lambda + 1.0)).exp().norm();
        assert!((ratio - (-2.0 * PI * 0.4f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn divergent_pole_rejected() {
        let p = pole(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(matches!(sigma_res(1.0, &[p]), Err(XsecError::DivergentPole { .. })));
    }

    #[test]
    fn optical_forms_agree() {
        let p = PotentialParams::fig2();
        let a = sigma_total_pw(&p, 2.0, 1e-13).unwrap();
        let b = sigma_total_pw_squared(&p, 2.0, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }
}
