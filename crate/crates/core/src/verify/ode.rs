//! S-matrix from direct integration of the radial equation.

use num_complex::Complex64;

use super::highprec::{highprec_cylinder_oracle, OracleFunction};
use super::VerifyError;
use crate::model::PotentialParams;

pub const ODE_STEPS: usize = 20_000;
pub const STEP_TOL: f64 = 1e-8;
const HANKEL_DIGITS: u32 = 40;

/// `(u(R), u'(R⁻))` for `u'' = [(λ² - 1/4)/r² - 2V - 2E] u`, `u(a) = 0`,
/// `u'(a) = 1`, classical RK4 with `steps` equal steps across the well.
pub fn integrate_well(params: &PotentialParams, e: f64, lambda: f64, steps: usize) -> (f64, f64) {
    let a = params.core_radius();
    let h = params.d / steps as f64;
    let c = lambda * lambda - 0.25;
    let q2 = 2.0 * (e + params.v);
    let acc = |r: f64, u: f64| (c / (r * r) - q2) * u;
    let (mut u, mut p) = (0.0, 1.0);
    for i in 0..steps {
        let r = a + i as f64 * h;
        let k1u = p;
        let k1p = acc(r, u);
        let k2u = p + 0.5 * h * k1p;
        let k2p = acc(r + 0.5 * h, u + 0.5 * h * k1u);
        let k3u = p + 0.5 * h * k2p;
        let k3p = acc(r + 0.5 * h, u + 0.5 * h * k2u);
        let k4u = p + h * k3p;
        let k4p = acc(r + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    (u, p)
}

/// Match `u, u'` just outside the shell to `√r [H⁽²⁾(kr) + S H⁽¹⁾(kr)]`.
fn match_exterior(params: &PotentialParams, e: f64, lambda: f64, u: f64, p: f64) -> Result<Complex64, VerifyError> {
    let k = (2.0 * e).sqrt();
    let r = params.r;
    let p = p + 2.0 * params.omega * u;
    let order = Complex64::new(lambda, 0.0);
    let z = Complex64::new(k * r, 0.0);
    let h1 = highprec_cylinder_oracle(OracleFunction::H1, order, z, HANKEL_DIGITS)?;
    let h2 = highprec_cylinder_oracle(OracleFunction::H2, order, z, HANKEL_DIGITS)?;
    // g = √r H, g' = √r (k H' + H / 2r); the common √r cancels
    let m = Complex64::new(p / u - 0.5 / r, 0.0);
    let num = k * h2.deriv_arg - m * h2.value;
    let den = k * h1.deriv_arg - m * h1.value;
    if den.norm() == 0.0 {
        return Err(VerifyError::InvalidRequest(format!("exterior matching degenerate at λ = {lambda}")));
    }
    Ok(-num / den)
}

/// S at `(E, λ)` with `steps` RK4 steps, no convergence check.
pub fn s_matrix_ode_steps(params: &PotentialParams, e: f64, lambda: f64, steps: usize) -> Result<Complex64, VerifyError> {
    let (u, p) = integrate_well(params, e, lambda, steps);
    if u == 0.0 {
        return Err(VerifyError::InvalidRequest(format!("u(R) = 0 at E = {e}, λ = {lambda}")));
    }
    match_exterior(params, e, lambda, u, p)
}

/// S from the radial equation, checked against a run with half the step.
pub fn s_matrix_ode_oracle(params: &PotentialParams, e: f64, lambda: f64) -> Result<Complex64, VerifyError> {
    params.validate()?;
    if !(e > 0.0) || !lambda.is_finite() {
        return Err(VerifyError::InvalidRequest(format!("need E > 0 and finite real λ, got E = {e}, λ = {lambda}")));
    }
    let coarse = s_matrix_ode_steps(params, e, lambda, ODE_STEPS)?;
    let fine = s_matrix_ode_steps(params, e, lambda, 2 * ODE_STEPS)?;
    let diff = (coarse - fine).norm() / fine.norm();
    if diff > STEP_TOL {
        return Err(VerifyError::StepNonConvergence { steps: ODE_STEPS, difference: diff });
    }
    Ok(fine)
}

/// Ratio of successive errors `|S_N - S_4N| / |S_2N - S_4N|`, close to 16
/// for a fourth-order scheme in the asymptotic range.
pub fn convergence_ratio(params: &PotentialParams, e: f64, lambda: f64, steps: usize) -> Result<f64, VerifyError> {
    let reference = s_matrix_ode_steps(params, e, lambda, 16 * steps)?;
    let a = s_matrix_ode_steps(params, e, lambda, steps)?;
    let b = s_matrix_ode_steps(params, e, lambda, 2 * steps)?;
    Ok((a - reference).norm() / (b - reference).norm())
}
