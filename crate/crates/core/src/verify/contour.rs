//! Contour-integral oracles: residues by the trapezoid rule on a circle and
//! `σ'₁` along a path lifted above the Regge poles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::VerifyError;
use crate::model::{self, ModelError, PotentialParams};
use crate::poles::ReggePole;
use crate::quad::{integrate, QuadOptions};
use crate::xsec::lambda_max;

pub const DEFAULT_RADIUS: f64 = 1e-3;
pub const DEFAULT_DETOUR: f64 = 0.2;
const TRAPEZOID_START: usize = 32;
const TRAPEZOID_MAX: usize = 1 << 14;
const TRAPEZOID_TOL: f64 = 1e-10;
const ENCLOSURE_TOL: f64 = 1e-9;

fn s_at(params: &PotentialParams, e: f64, lambda: Complex64) -> Result<Complex64, ModelError> {
    let kin = model::kinematics_real(params, e);
    let m = model::matching(params, &kin, lambda)?;
    if m.d1.norm() == 0.0 {
        return Err(ModelError::ZeroDenominator { lambda });
    }
    Ok(m.s())
}

/// `(1/2πi) ∮ S dλ` on the circle `|λ - center| = radius`.
fn circle_integral(params: &PotentialParams, e: f64, center: Complex64, radius: f64) -> Result<Complex64, VerifyError> {
    let mut scale = 0.0f64;
    let mut sample = |n: usize, offset: usize, stride: usize| -> Result<(Complex64, f64), VerifyError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (offset..n).step_by(stride) {
            let w = Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
            let t = s_at(params, e, center + w)? * w;
            scale = scale.max(t.norm());
            acc += t;
        }
        Ok((acc, scale))
    };
    let mut n = TRAPEZOID_START;
    let (mut sum, _) = sample(n, 0, 1)?;
    let mut value = sum / n as f64;
    while n < TRAPEZOID_MAX {
        // reuse the old nodes: only odd indices of the doubled grid are new
        let (fresh, scale) = sample(2 * n, 1, 2)?;
        sum += fresh;
        n *= 2;
        let next = sum / n as f64;
        let change = (next - value).norm();
        value = next;
        // the second test catches an empty circle, where only rounding noise remains
        if change <= TRAPEZOID_TOL * value.norm() || change <= 1e-14 * scale {
            return Ok(value);
        }
    }
    Err(VerifyError::NoConvergence { what: "trapezoid residue".into(), nodes: n })
}

/// Residue of `S` at `lambda_pole` as a contour average. The circle's
/// enclosure is checked by repeating the integral at half the radius.
pub fn residue_contour_oracle(params: &PotentialParams, e: f64, lambda_pole: Complex64, radius: f64) -> Result<Complex64, VerifyError> {
    if !(radius > 0.0) {
        return Err(VerifyError::InvalidRequest(format!("radius {radius}")));
    }
    let full = circle_integral(params, e, lambda_pole, radius)?;
    let half = circle_integral(params, e, lambda_pole, 0.5 * radius)?;
    let scale = full.norm().max(half.norm());
    let diff = (full - half).norm();
    if diff > ENCLOSURE_TOL * scale && diff > 1e-12 {
        return Err(VerifyError::EnclosureViolation { radius, difference: diff / scale.max(1e-300) });
    }
    Ok(full)
}

/// Circle average with no enclosure check; zero when no pole is inside.
pub fn contour_average(params: &PotentialParams, e: f64, center: Complex64, radius: f64) -> Result<Complex64, VerifyError> {
    circle_integral(params, e, center, radius)
}

/// One leg of the lifted path: `λ(t)` and `dλ/dt` on `[0, 1]`.
enum Leg {
    Line(Complex64, Complex64),
    /// Upper half circle around `center`, traversed from the left end to the right.
    Arc { center: Complex64, radius: f64 },
}

impl Leg {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        match *self {
            Leg::Line(a, b) => (a + (b - a) * t, b - a),
            Leg::Arc { center, radius } => {
                let th = PI * (1.0 - t);
                let w = Complex64::from_polar(radius, th);
                (center + w, -Complex64::i() * w * PI)
            }
        }
    }
}

fn lifted_path(poles: &[ReggePole], end: f64, rho: f64) -> Result<Vec<Leg>, VerifyError> {
    let mut ps: Vec<Complex64> = poles.iter().map(|p| p.lambda).collect();
    ps.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut legs = Vec::new();
    let mut x = 0.0;
    for (i, p) in ps.iter().enumerate() {
        if p.re - rho < x + 0.1 * rho || i > 0 && p.re - ps[i - 1].re < 2.0 * rho + 0.1 {
            return Err(VerifyError::DetourOverlap { lambda: *p, spacing: p.re - x });
        }
        let (l, r) = (p.re - rho, p.re + rho);
        legs.push(Leg::Line(Complex64::new(x, 0.0), Complex64::new(l, 0.0)));
        let lift = p.im.max(0.0);
        if lift > 0.0 {
            legs.push(Leg::Line(Complex64::new(l, 0.0), Complex64::new(l, lift)));
        }
        legs.push(Leg::Arc { center: Complex64::new(p.re, lift), radius: rho });
        if lift > 0.0 {
            legs.push(Leg::Line(Complex64::new(r, lift), Complex64::new(r, 0.0)));
        }
        x = r;
    }
    legs.push(Leg::Line(Complex64::new(x, 0.0), Complex64::new(end.max(x + 1.0), 0.0)));
    Ok(legs)
}

/// `σ'₁ = (4π/k²) Re ∫_Γ λ (1 - S) dλ` with `Γ` running from `0` along the
/// real axis and over each listed pole on a semicircle of radius `rho`.
/// The real part is taken of the continued integrand's integral, which is
/// what makes `σ'₁ = σ₁ - Σ σ_res⁽⁰⁾`.
pub fn deformed_contour_sigma1_oracle(params: &PotentialParams, e: f64, poles: &[ReggePole], rho: f64) -> Result<f64, VerifyError> {
    if !(e > 0.0) {
        return Err(VerifyError::InvalidRequest(format!("E = {e}")));
    }
    let k = (2.0 * e).sqrt();
    let end_pole = poles.iter().map(|p| p.lambda.re + rho + 2.0).fold(0.0, f64::max);
    let end = lambda_max(params, e).max(end_pole);
    let legs = lifted_path(poles, end, rho)?;
    let opts = QuadOptions { abs_tol: 1e-11, rel_tol: 1e-12, max_intervals: 4000 };
    let mut total = Complex64::new(0.0, 0.0);
    for leg in &legs {
        let length = match leg {
            Leg::Line(a, b) => (b - a).norm(),
            Leg::Arc { radius, .. } => PI * radius,
        };
        let pieces = (length / 1.0).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=pieces).map(|i| i as f64 / pieces as f64).collect();
        let f = |t: f64| -> Result<Complex64, ModelError> {
            let (l, dl) = leg.eval(t);
            Ok(l * (1.0 - s_at(params, e, l)?) * dl)
        };
        let r = integrate(f, &breaks, opts)?;
        if !r.converged {
            return Err(VerifyError::Quadrature { value: r.value.re, error: r.error });
        }
        total += r.value;
    }
    Ok(4.0 * PI / (k * k) * total.re)
}
