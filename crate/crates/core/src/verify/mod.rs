//! Independent oracles for the analytic pipeline.
//!
//! Each oracle shares as little code as possible with the path it checks:
//! the radial equation is integrated directly, residues come from contour
//! averages, and cylinder functions from multiprecision series.

mod contour;
mod highprec;
mod ode;

pub use contour::{contour_average, deformed_contour_sigma1_oracle, residue_contour_oracle, DEFAULT_DETOUR, DEFAULT_RADIUS};
pub use highprec::{highprec_cylinder_oracle, OracleFunction};
pub use ode::{convergence_ratio, integrate_well, s_matrix_ode_oracle, s_matrix_ode_steps, ODE_STEPS};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cylinder::{self, CylinderError, HankelKind, MAX_ARG, MAX_IM_ORDER, MAX_RE_ORDER};
use crate::model::{self, ModelError, PotentialParams};
use crate::poles::{self, PoleError};

pub const REL_ERROR_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("invalid oracle request: {0}")]
    InvalidRequest(String),
    #[error("{what} not certified: precisions disagree by {difference:e}")]
    NotCertified { what: String, difference: f64 },
    #[error("ODE step halving from {steps} steps changed S by {difference:e}")]
    StepNonConvergence { steps: usize, difference: f64 },
    #[error("contour of radius {radius} does not isolate one pole (halving changed the result by {difference:e})")]
    EnclosureViolation { radius: f64, difference: f64 },
    #[error("{what} did not converge with {nodes} nodes")]
    NoConvergence { what: String, nodes: usize },
    #[error("detour around lambda = {lambda} overlaps its neighbour (spacing {spacing})")]
    DetourOverlap { lambda: Complex64, spacing: f64 },
    #[error("contour quadrature did not converge: {value} +- {error:e}")]
    Quadrature { value: f64, error: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cylinder(#[from] CylinderError),
    #[error(transparent)]
    Pole(#[from] PoleError),
}

/// One main-vs-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub main_value: Complex64,
    pub oracle_value: Complex64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, main_value: Complex64, oracle_value: Complex64, tolerance: f64) -> Self {
        let rel_error = rel_error(main_value, oracle_value);
        OracleReport { quantity: quantity.into(), main_value, oracle_value, rel_error, tolerance, passed: rel_error <= tolerance }
    }

    pub fn real(quantity: impl Into<String>, main: f64, oracle: f64, tolerance: f64) -> Self {
        Self::new(quantity, Complex64::new(main, 0.0), Complex64::new(oracle, 0.0), tolerance)
    }

    /// A comparison that could not be carried out.
    pub fn failed(quantity: impl Into<String>, tolerance: f64) -> Self {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        OracleReport { quantity: quantity.into(), main_value: nan, oracle_value: nan, rel_error: f64::INFINITY, tolerance, passed: false }
    }

    pub const CSV_HEADER: &'static str = "quantity,main_re,main_im,oracle_re,oracle_im,rel_error,tolerance,passed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{}",
            self.quantity.replace(',', ";"),
            self.main_value.re,
            self.main_value.im,
            self.oracle_value.re,
            self.oracle_value.im,
            self.rel_error,
            self.tolerance,
            self.passed
        )
    }
}

pub fn rel_error(main: Complex64, oracle: Complex64) -> f64 {
    (main - oracle).norm() / oracle.norm().max(REL_ERROR_FLOOR)
}

/// `q cot(qd) + 2Ω - ik` for the `λ = 1/2` wave, whose zeros in `k` are the
/// Siegert states of that wave.
pub fn half_order_condition(params: &PotentialParams, k: Complex64) -> Complex64 {
    let q = (k * k + 2.0 * params.v).sqrt();
    q * (q * params.d).cos() / (q * params.d).sin() + 2.0 * params.omega - Complex64::i() * k
}

/// Siegert state of the `λ = 1/2` wave from the closed-form condition, by
/// secant iteration from `seed_k`.
pub fn half_order_siegert_oracle(params: &PotentialParams, seed_k: Complex64) -> Result<Complex64, VerifyError> {
    let f = |k: Complex64| {
        let q = (k * k + 2.0 * params.v).sqrt();
        let qd = q * params.d;
        // multiplied through by sin(qd) so the function is finite everywhere
        q * qd.cos() + (2.0 * params.omega - Complex64::i() * k) * qd.sin()
    };
    let mut x0 = seed_k;
    let mut x1 = seed_k * (1.0 + 1e-4) + 1e-6;
    let (mut f0, mut f1) = (f(x0), f(x1));
    for n in 0..100 {
        if f1 == f0 {
            if f1.norm() < 1e-12 {
                return Ok(x1);
            }
            return Err(VerifyError::NoConvergence { what: "half-order secant".into(), nodes: n });
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (x2 - x1).norm() <= 1e-14 * x2.norm().max(1.0) {
            return Ok(x2);
        }
        (x0, f0) = (x1, f1);
        x1 = x2;
        f1 = f(x1);
    }
    Err(VerifyError::NoConvergence { what: "half-order secant".into(), nodes: 100 })
}

/// Bound-state energies of the `λ = 1/2` wave by sign changes of the
/// closed-form condition on `k = iκ`, refined by bisection.
pub fn half_order_bound_states(params: &PotentialParams) -> Vec<f64> {
    let kmax = (2.0 * params.v).sqrt();
    let g = |kappa: f64| {
        let q = (2.0 * params.v - kappa * kappa).max(0.0).sqrt();
        q * (q * params.d).cos() + (2.0 * params.omega + kappa) * (q * params.d).sin()
    };
    let n = 4000;
    let mut out = Vec::new();
    let grid: Vec<f64> = (1..n).map(|i| kmax * i as f64 / n as f64).collect();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            out.push(-0.5 * a * a);
            continue;
        }
        if ga * gb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let gm = g(m);
            if gm * ga <= 0.0 {
                b = m;
            } else {
                a = m;
                ga = gm;
            }
        }
        let kappa = 0.5 * (a + b);
        out.push(-0.5 * kappa * kappa);
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

fn random_domain_point(rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    loop {
        let order = Complex64::new(rng.gen_range(-MAX_RE_ORDER..MAX_RE_ORDER), rng.gen_range(-MAX_IM_ORDER..MAX_IM_ORDER));
        let arg = Complex64::from_polar(rng.gen_range(0.05..MAX_ARG), rng.gen_range(-3.0..3.0));
        if !cylinder::is_near_integer(order) && (order - order.re.round()).norm() > 1e-3 {
            return (order, arg);
        }
    }
}

/// Fast-path cylinder functions against the multiprecision oracle at `count`
/// pseudo-random domain points.
pub fn cylinder_battery(count: usize, seed: u64, tolerance: f64) -> Vec<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..count {
        let (order, arg) = random_domain_point(&mut rng);
        let func = [OracleFunction::J, OracleFunction::H1, OracleFunction::H2][i % 3];
        let label = format!("cylinder {func:?} order={order} arg={arg}");
        let main = match func {
            OracleFunction::J => cylinder::bessel_j_value(order, arg),
            OracleFunction::H1 => cylinder::hankel(HankelKind::First, order, arg),
            OracleFunction::H2 => cylinder::hankel(HankelKind::Second, order, arg),
        };
        let oracle = highprec_cylinder_oracle(func, order, arg, 50);
        out.push(match (main, oracle) {
            (Ok(m), Ok(o)) => OracleReport::new(label, m.value, o.value, tolerance),
            _ => OracleReport::failed(label, tolerance),
        });
    }
    out
}

/// `S` from the matching conditions against the radial-equation oracle.
pub fn ode_battery(params: &PotentialParams, points: &[(f64, f64)], tolerance: f64) -> Vec<OracleReport> {
    points
        .iter()
        .map(|&(e, l)| {
            let label = format!("S ode E={e} lambda={l} omega={}", params.omega);
            let main = model::s_matrix_real(params, e, Complex64::new(l, 0.0));
            let oracle = s_matrix_ode_oracle(params, e, l);
            match (main, oracle) {
                (Ok(m), Ok(o)) => OracleReport::new(label, m, o, tolerance),
                _ => OracleReport::failed(label, tolerance),
            }
        })
        .collect()
}

/// `model::residue` against the contour average at the given poles.
pub fn residue_battery(params: &PotentialParams, poles: &[poles::ReggePole], tolerance: f64) -> Vec<OracleReport> {
    poles
        .iter()
        .map(|p| {
            let label = format!("residue E={} lambda={}", p.e, p.lambda);
            match residue_contour_oracle(params, p.e, p.lambda, DEFAULT_RADIUS) {
                Ok(o) => OracleReport::new(label, p.residue, o, tolerance),
                Err(_) => OracleReport::failed(label, tolerance),
            }
        })
        .collect()
}

/// A quick battery touching every oracle once, for the command line.
pub fn standard_battery() -> Vec<OracleReport> {
    let mut out = cylinder_battery(12, 7, 1e-10);
    for params in [PotentialParams::fig2(), PotentialParams::fig3()] {
        out.extend(ode_battery(&params, &[(0.5, 0.5), (2.0, 1.5), (8.0, 3.5), (20.0, 6.5)], 1e-8));
        for e in [2.0, 20.0] {
            match poles::scan_poles(&params, e, poles::Region::new(0.0, 15.0, 0.001, 2.0)) {
                Ok(scan) => out.extend(residue_battery(&params, &scan.poles, 1e-8)),
                Err(_) => out.push(OracleReport::failed(format!("pole scan E={e} omega={}", params.omega), 1e-8)),
            }
        }
    }
    let p = PotentialParams::fig2();
    let bound = poles::bound_state_energies(&p, 0.5).unwrap_or_default();
    let closed = half_order_bound_states(&p);
    for (i, (m, o)) in bound.iter().zip(&closed).enumerate() {
        out.push(OracleReport::real(format!("bound state {i} lambda=1/2"), *m, *o, 1e-10));
    }
    if bound.len() != closed.len() {
        out.push(OracleReport::real("bound state count lambda=1/2", bound.len() as f64, closed.len() as f64, 0.0));
    }
    out
}
