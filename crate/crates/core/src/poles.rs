//! Regge poles `λ̃(E)`, Siegert energies `Ẽ(λ)`, trajectory continuation,
//! exhaustive scans by the argument principle, and trajectory classification.
//!
//! All root solves work on the entire matching determinant `D₁` from
//! [`crate::model`], whose zeros are exactly the poles of `S`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::cylinder::{CylinderError, MAX_IM_ORDER, MAX_RE_ORDER};
use crate::model::{
    self, from_wavenumber, kinematics, kinematics_real, matching, richardson_derivative,
    ChannelKinematics, ModelError, PotentialParams, Sheet, POLE_THRESHOLD,
};

pub const MAX_ITERATIONS: usize = 50;
pub const LAMBDA_JUMP_GUARD: f64 = 0.5;
pub const K_JUMP_GUARD: f64 = 0.3;
pub const MAX_HALVINGS: usize = 6;
/// `|γ|` below this counts as a true bound state.
pub const TOL_BOUND: f64 = 1e-9;
const STEP_TOL: f64 = 1e-12;
const DIFF_STEP: f64 = 1e-6;
const EDGE_POINTS: usize = 64;
const MAX_ARG_STEP: f64 = 0.3;
const MAX_SCAN_DEPTH: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("Newton iteration did not converge in {iterations} steps (last iterate {last})")]
    NoConvergence { iterations: usize, last: Complex64 },
    #[error("iterate {at} left the supported domain")]
    LeftDomain { at: Complex64 },
    #[error("root {found} is farther than {guard} from the seed {seed}")]
    JumpGuard { seed: Complex64, found: Complex64, guard: f64 },
    #[error("continuation lost at E = {energy} after {completed} samples")]
    ContinuationLost { energy: f64, completed: usize },
    #[error("converged to k = {k}, which is not on the requested sheet")]
    WrongSheet { k: Complex64 },
    #[error("a pole lies on or next to the scan boundary near {near}")]
    BoundaryZero { near: Complex64 },
    #[error("winding number {value} is not close to an integer")]
    WindingNonIntegral { value: f64 },
    #[error("could not isolate {count} zeros in the cell around {center}")]
    Unresolved { count: i64, center: Complex64 },
    #[error("state cannot be classified: E0 = {e0}, gamma = {gamma}")]
    Unclassifiable { e0: f64, gamma: f64 },
    #[error("no bound state with index {index} at lambda = {lambda}")]
    NoSuchState { index: usize, lambda: f64 },
}

impl PoleError {
    fn from_model(e: ModelError, at: Complex64) -> Self {
        match e {
            ModelError::Cylinder(CylinderError::DomainExceeded { .. }) => PoleError::LeftDomain { at },
            other => PoleError::Model(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReggePole {
    pub e: f64,
    pub lambda: Complex64,
    pub residue: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReggeTrajectory {
    pub params: PotentialParams,
    pub samples: Vec<ReggePole>,
    pub sheet_tag: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegertState {
    pub lambda: f64,
    pub e: Complex64,
    pub k: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiegertTrajectory {
    pub params: PotentialParams,
    pub samples: Vec<SiegertState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    BoundCorrelated,
    MetastableCorrelated,
}

impl TrajectoryKind {
    pub fn label(&self) -> &'static str {
        match self {
            TrajectoryKind::BoundCorrelated => "type=I bound-correlated",
            TrajectoryKind::MetastableCorrelated => "type=II metastable-correlated",
        }
    }

    /// Section heading naming the trajectory type.
    pub fn heading(&self) -> &'static str {
        match self {
            TrajectoryKind::BoundCorrelated => "(I) Regge trajectory related to a bound state.",
            TrajectoryKind::MetastableCorrelated => "(II) Regge trajectory related to a metastable state.",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryClass {
    pub kind: TrajectoryKind,
    pub e0: f64,
    pub gamma: f64,
}

fn in_domain(lambda: Complex64) -> bool {
    lambda.re.abs() <= MAX_RE_ORDER && lambda.im.abs() <= MAX_IM_ORDER && lambda.norm().is_finite()
}

/// Newton on a complex function with finite-difference derivative.
fn newton(
    f: impl Fn(Complex64) -> Result<Complex64, ModelError>,
    admissible: impl Fn(Complex64) -> bool,
    seed: Complex64,
    guard: f64,
) -> Result<Complex64, PoleError> {
    let mut x = seed;
    for _ in 0..MAX_ITERATIONS {
        if !admissible(x) {
            return Err(PoleError::LeftDomain { at: x });
        }
        let fx = f(x).map_err(|e| PoleError::from_model(e, x))?;
        let h = DIFF_STEP * x.norm().max(1.0);
        let slope = richardson_derivative(&f, x, h).map_err(|e| PoleError::from_model(e, x))?;
        if slope.norm() == 0.0 || !slope.norm().is_finite() {
            return Err(PoleError::NoConvergence { iterations: 0, last: x });
        }
        let step = fx / slope;
        x -= step;
        if (x - seed).norm() > guard {
            return Err(PoleError::JumpGuard { seed, found: x, guard });
        }
        if step.norm() < STEP_TOL * x.norm().max(1.0) {
            return Ok(x);
        }
    }
    Err(PoleError::NoConvergence { iterations: MAX_ITERATIONS, last: x })
}

fn polish_lambda(
    params: &PotentialParams,
    kin: &ChannelKinematics,
    e: f64,
    seed: Complex64,
    guard: f64,
) -> Result<ReggePole, PoleError> {
    let lambda = newton(|l| matching(params, kin, l).map(|m| m.d1), in_domain, seed, guard)?;
    let m = matching(params, kin, lambda)?;
    if m.pole_ratio() > POLE_THRESHOLD {
        return Err(PoleError::NoConvergence { iterations: MAX_ITERATIONS, last: lambda });
    }
    let residue = model::residue(params, kin, lambda)?;
    Ok(ReggePole { e, lambda, residue })
}

/// The Regge pole nearest `seed` at real energy `e`.
pub fn find_regge_pole(params: &PotentialParams, e: f64, seed: Complex64) -> Result<ReggePole, PoleError> {
    let kin = kinematics_real(params, e);
    polish_lambda(params, &kin, e, seed, LAMBDA_JUMP_GUARD)
}

/// Continue a pole along a monotone energy grid. On failure the samples
/// gathered so far are returned alongside the error.
pub fn trace_regge_trajectory(
    params: &PotentialParams,
    e_grid: &[f64],
    seed: Complex64,
) -> Result<ReggeTrajectory, (ReggeTrajectory, PoleError)> {
    let mut traj = ReggeTrajectory { params: *params, samples: Vec::new(), sheet_tag: "physical".into() };
    let Some(&e_first) = e_grid.first() else {
        return Ok(traj);
    };
    let first = match find_regge_pole(params, e_first, seed) {
        Ok(p) => p,
        Err(err) => return Err((traj, err)),
    };
    traj.samples.push(first);
    // Accepted points, including intermediate half-steps, for prediction.
    let mut history: Vec<(f64, Complex64)> = vec![(e_first, first.lambda)];
    for &target in &e_grid[1..] {
        let mut e_cur = history.last().expect("non-empty").0;
        let mut step = target - e_cur;
        let mut halvings = 0;
        loop {
            let e_try = if (e_cur + step - target) * step.signum() >= 0.0 { target } else { e_cur + step };
            let predicted = predict(&history, e_try);
            let kin = kinematics_real(params, e_try);
            match polish_lambda(params, &kin, e_try, predicted, LAMBDA_JUMP_GUARD) {
                Ok(p) if (p.lambda - history.last().expect("non-empty").1).norm() < LAMBDA_JUMP_GUARD => {
                    history.push((e_try, p.lambda));
                    e_cur = e_try;
                    if e_try == target {
                        traj.samples.push(p);
                        break;
                    }
                }
                _ => {
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        let completed = traj.samples.len();
                        return Err((traj, PoleError::ContinuationLost { energy: e_try, completed }));
                    }
                    step *= 0.5;
                }
            }
        }
        if history.len() > 4 {
            history.drain(..history.len() - 4);
        }
    }
    Ok(traj)
}

/// The Regge pole at real energy `Re Ẽ` on the trajectory through a
/// `λ = 1/2` Siegert state. `k` is moved in a straight line from the
/// state's wavenumber to the real-energy one while `λ̃` is tracked.
pub fn regge_pole_from_level(params: &PotentialParams, st: &SiegertState) -> Result<ReggePole, PoleError> {
    const K_STEP: f64 = 0.02;
    let e0 = st.e.re;
    let k_end = kinematics_real(params, e0).k;
    let steps = ((st.k - k_end).norm() / K_STEP).ceil().clamp(1.0, 5000.0) as usize;
    let mut lambda = Complex64::new(st.lambda, 0.0);
    let mut previous = lambda;
    for i in 1..=steps {
        let k = st.k + (k_end - st.k) * (i as f64 / steps as f64);
        let kin = from_wavenumber(params, k);
        let seed = if i > 1 { 2.0 * lambda - previous } else { lambda };
        let p = polish_lambda(params, &kin, e0, seed, LAMBDA_JUMP_GUARD)?;
        previous = lambda;
        lambda = p.lambda;
    }
    find_regge_pole(params, e0, lambda)
}

fn predict(history: &[(f64, Complex64)], e: f64) -> Complex64 {
    match history {
        [] => unreachable!(),
        [(_, l)] => *l,
        [.., (e0, l0), (e1, l1)] => *l1 + (*l1 - *l0) * ((e - e1) / (e1 - e0)),
    }
}

/// Siegert energy at real `lambda`, by Newton in `k` starting from the
/// wavenumber of `seed_e` on `sheet`.
pub fn find_siegert_energy(
    params: &PotentialParams,
    lambda: f64,
    seed_e: Complex64,
    sheet: Sheet,
) -> Result<SiegertState, PoleError> {
    let seed_k = kinematics(params, seed_e, sheet).k;
    find_siegert_from_k(params, lambda, seed_k, sheet)
}

pub fn find_siegert_from_k(
    params: &PotentialParams,
    lambda: f64,
    seed_k: Complex64,
    sheet: Sheet,
) -> Result<SiegertState, PoleError> {
    let l = Complex64::new(lambda, 0.0);
    let f = |k: Complex64| matching(params, &from_wavenumber(params, k), l).map(|m| m.d1);
    let k = newton(f, |k| k.norm() > 0.0 && k.norm().is_finite(), seed_k, K_JUMP_GUARD)?;
    let wrong = match sheet {
        Sheet::Physical => k.im < -1e-12 * k.norm(),
        Sheet::Continued => k.im > 1e-12 * k.norm(),
    };
    if wrong {
        return Err(PoleError::WrongSheet { k });
    }
    Ok(SiegertState { lambda, e: 0.5 * k * k, k })
}

/// Siegert energies along a monotone grid of real `λ`.
pub fn trace_siegert_trajectory(
    params: &PotentialParams,
    lambda_grid: &[f64],
    seed_e: Complex64,
    sheet: Sheet,
) -> Result<SiegertTrajectory, PoleError> {
    let mut samples: Vec<SiegertState> = Vec::with_capacity(lambda_grid.len());
    let mut k_seed = kinematics(params, seed_e, sheet).k;
    for (i, &l) in lambda_grid.iter().enumerate() {
        if i >= 2 {
            let (a, b) = (&samples[i - 2], &samples[i - 1]);
            k_seed = b.k + (b.k - a.k) * ((l - b.lambda) / (b.lambda - a.lambda));
        } else if i == 1 {
            k_seed = samples[0].k;
        }
        samples.push(find_siegert_from_k(params, l, k_seed, sheet)?);
    }
    Ok(SiegertTrajectory { params: *params, samples })
}

/// Real sign function whose zeros in `κ` are bound states at `k = iκ`.
fn bound_state_indicator(params: &PotentialParams, lambda: f64, kappa: f64) -> Result<f64, ModelError> {
    let kin = from_wavenumber(params, Complex64::new(0.0, kappa));
    let m = matching(params, &kin, Complex64::new(lambda, 0.0))?;
    Ok((m.d1 * m.h1.value.conj()).re / (m.h1.value.norm() * m.scale1))
}

/// Bound-state energies at real `lambda`, ascending, by bracketing sign
/// changes on the imaginary `k` axis and bisecting.
pub fn bound_state_energies(params: &PotentialParams, lambda: f64) -> Result<Vec<f64>, PoleError> {
    let kmax = (2.0 * params.v).sqrt();
    if kmax == 0.0 {
        return Ok(Vec::new());
    }
    let n = 600;
    let kappa_at = |i: usize| kmax * (1e-4 + (1.0 - 2e-4) * i as f64 / n as f64);
    let mut out = Vec::new();
    let mut prev = (kappa_at(0), bound_state_indicator(params, lambda, kappa_at(0))?);
    for i in 1..=n {
        let x = kappa_at(i);
        let g = bound_state_indicator(params, lambda, x)?;
        if g == 0.0 {
            out.push(-0.5 * x * x);
        } else if g.signum() != prev.1.signum() {
            let (mut a, mut b, mut ga) = (prev.0, x, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = bound_state_indicator(params, lambda, mid)?;
                if gm.signum() == ga.signum() {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            let kappa = 0.5 * (a + b);
            out.push(-0.5 * kappa * kappa);
        }
        prev = (x, g);
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

/// Levels of the well with an impenetrable shell at `λ = 1/2`:
/// `q d = nπ`, i.e. `E_n = (nπ/d)²/2 - V`, for `n = 1..=count`.
pub fn impenetrable_levels(params: &PotentialParams, count: usize) -> Vec<f64> {
    (1..=count).map(|n| 0.5 * (n as f64 * PI / params.d).powi(2) - params.v).collect()
}

/// Bound state number `index` (0 = deepest) at `λ = 1/2`.
pub fn bound_state(params: &PotentialParams, index: usize) -> Result<SiegertState, PoleError> {
    let levels = bound_state_energies(params, 0.5)?;
    let e = *levels.get(index).ok_or(PoleError::NoSuchState { index, lambda: 0.5 })?;
    find_siegert_energy(params, 0.5, Complex64::new(e, 0.0), Sheet::Physical)
}

/// Follow a `λ = 1/2` level from the impenetrable-shell limit down to the
/// actual shell strength, Newton-solving in `k` at each step of `ln Ω`.
fn continue_from_impenetrable(params: &PotentialParams, level_e: f64) -> Result<SiegertState, PoleError> {
    let target = params.omega;
    let start = (1e4 * target.abs().max(1.0)).max(1e5);
    let sheet = if level_e < 0.0 { Sheet::Physical } else { Sheet::Continued };
    let k0 = kinematics(params, Complex64::new(level_e, 0.0), sheet).k;
    let mut st = find_siegert_from_k(&params.with_omega(start), 0.5, k0, sheet)?;
    let mut hist: Vec<(f64, Complex64)> = vec![(start.ln(), st.k)];
    let goal = target.max(1e-3).ln();
    let mut x = start.ln();
    let mut step: f64 = -0.15;
    let mut halvings = 0;
    while x > goal {
        let x_try = (x + step).max(goal);
        let seed = predict_pair(&hist, x_try);
        let omega = if x_try == goal { target } else { x_try.exp() };
        match find_siegert_from_k(&params.with_omega(omega), 0.5, seed, sheet) {
            Ok(s) => {
                st = s;
                x = x_try;
                hist.push((x, s.k));
                if hist.len() > 2 {
                    hist.remove(0);
                }
                step = (step * 1.5).max(-0.3);
            }
            Err(e) => {
                halvings += 1;
                if halvings > 4 * MAX_HALVINGS {
                    return Err(e);
                }
                step *= 0.5;
            }
        }
    }
    Ok(st)
}

fn predict_pair(hist: &[(f64, Complex64)], x: f64) -> Complex64 {
    match hist {
        [(_, k)] => *k,
        [.., (x0, k0), (x1, k1)] => *k1 + (*k1 - *k0) * ((x - x1) / (x1 - x0)),
        [] => unreachable!(),
    }
}

/// Metastable state number `index` (0 = lowest) at `λ = 1/2`, correlated
/// with the impenetrable-shell levels of positive energy.
pub fn metastable_state(params: &PotentialParams, index: usize) -> Result<SiegertState, PoleError> {
    let levels: Vec<f64> = impenetrable_levels(params, 60).into_iter().filter(|e| *e > 0.0).collect();
    let e = *levels.get(index).ok_or(PoleError::NoSuchState { index, lambda: 0.5 })?;
    continue_from_impenetrable(params, e)
}

pub fn lowest_metastable(params: &PotentialParams) -> Result<SiegertState, PoleError> {
    metastable_state(params, 0)
}

/// Which `λ = 1/2` level a trajectory is attached to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSelector {
    /// Bound state by energy order, 0 = deepest.
    Bound(usize),
    /// Metastable state by energy order, 0 = lowest.
    Metastable(usize),
    /// Newton from an explicit energy; the sheet follows its sign.
    Seed(f64),
}

pub fn find_level(params: &PotentialParams, sel: LevelSelector) -> Result<SiegertState, PoleError> {
    match sel {
        LevelSelector::Bound(i) => bound_state(params, i),
        LevelSelector::Metastable(i) => metastable_state(params, i),
        LevelSelector::Seed(e) => {
            let sheet = if e < 0.0 { Sheet::Physical } else { Sheet::Continued };
            find_siegert_energy(params, 0.5, Complex64::new(e, 0.0), sheet)
        }
    }
}

/// Classify the trajectory through the `λ = 1/2` state nearest `seed_e`.
pub fn classify_trajectory(params: &PotentialParams, seed_e: f64) -> Result<TrajectoryClass, PoleError> {
    let sheet = if seed_e < 0.0 { Sheet::Physical } else { Sheet::Continued };
    let st = find_siegert_energy(params, 0.5, Complex64::new(seed_e, 0.0), sheet)?;
    classify_state(&st)
}

pub fn classify_state(st: &SiegertState) -> Result<TrajectoryClass, PoleError> {
    classify_state_tol(st, TOL_BOUND)
}

/// As [`classify_state`], with `|γ| < tol` counting as bound.
pub fn classify_state_tol(st: &SiegertState, tol: f64) -> Result<TrajectoryClass, PoleError> {
    let e0 = st.e.re;
    let gamma = 0.0 - st.e.im;
    let kind = if e0 < 0.0 && gamma.abs() < tol {
        TrajectoryKind::BoundCorrelated
    } else if e0 > 0.0 && gamma > 0.0 {
        TrajectoryKind::MetastableCorrelated
    } else {
        return Err(PoleError::Unclassifiable { e0, gamma });
    };
    Ok(TrajectoryClass { kind, e0, gamma })
}

/// Pole estimate from the centrifugal shift of a level at `e0`:
/// `λ² ≈ 2 (E - E₀)(R - d/2)² + 1/4`, principal root.
pub fn centrifugal_estimate(params: &PotentialParams, e: f64, e0: f64) -> Complex64 {
    let rm = params.r - 0.5 * params.d;
    Complex64::new(2.0 * (e - e0) * rm * rm + 0.25, 0.0).sqrt()
}

/// Rectangle in the `λ` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Region { re_min, re_max, im_min, im_max }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn diagonal(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    /// Four children split slightly off-center.
    fn quarters(&self) -> [Region; 4] {
        let xm = self.re_min + 0.5037 * (self.re_max - self.re_min);
        let ym = self.im_min + 0.4969 * (self.im_max - self.im_min);
        [
            Region::new(self.re_min, xm, self.im_min, ym),
            Region::new(xm, self.re_max, self.im_min, ym),
            Region::new(xm, self.re_max, ym, self.im_max),
            Region::new(self.re_min, xm, ym, self.im_max),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleScan {
    pub poles: Vec<ReggePole>,
    /// Winding number of `D₁` around the whole region.
    pub winding: i64,
}

struct Scanner<'a> {
    params: &'a PotentialParams,
    kin: ChannelKinematics,
    e: f64,
    cache: HashMap<(u64, u64), Complex64>,
}

impl Scanner<'_> {
    fn d1(&mut self, z: Complex64) -> Result<Complex64, PoleError> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let m = matching(self.params, &self.kin, z).map_err(|e| PoleError::from_model(e, z))?;
        if m.pole_ratio() < 1e-10 {
            return Err(PoleError::BoundaryZero { near: z });
        }
        self.cache.insert(key, m.d1);
        Ok(m.d1)
    }

    fn arg_change(&mut self, a: Complex64, fa: Complex64, b: Complex64, fb: Complex64, depth: usize) -> Result<f64, PoleError> {
        let d = (fb / fa).arg();
        if d.abs() <= MAX_ARG_STEP {
            return Ok(d);
        }
        if depth > 40 || (b - a).norm() < 1e-9 {
            return Err(PoleError::BoundaryZero { near: a });
        }
        let m = 0.5 * (a + b);
        let fm = self.d1(m)?;
        Ok(self.arg_change(a, fa, m, fm, depth + 1)? + self.arg_change(m, fm, b, fb, depth + 1)?)
    }

    fn winding(&mut self, region: &Region) -> Result<i64, PoleError> {
        let c = region.corners();
        let mut total = 0.0;
        for i in 0..4 {
            let (a, b) = (c[i], c[(i + 1) % 4]);
            let mut prev = a;
            let mut fprev = self.d1(a)?;
            for j in 1..=EDGE_POINTS {
                let z = if j == EDGE_POINTS { b } else { a + (b - a) * (j as f64 / EDGE_POINTS as f64) };
                let fz = self.d1(z)?;
                total += self.arg_change(prev, fprev, z, fz, 0)?;
                prev = z;
                fprev = fz;
            }
        }
        let w = total / (2.0 * PI);
        let n = w.round();
        if (w - n).abs() > 0.1 {
            return Err(PoleError::WindingNonIntegral { value: w });
        }
        Ok(n as i64)
    }

    fn resolve(&mut self, region: Region, count: i64, depth: usize, out: &mut Vec<ReggePole>) -> Result<(), PoleError> {
        if count == 0 {
            return Ok(());
        }
        if count == 1 {
            if let Ok(p) = polish_lambda(self.params, &self.kin, self.e, region.center(), region.diagonal()) {
                if region.contains(p.lambda) {
                    out.push(p);
                    return Ok(());
                }
            }
        }
        if depth >= MAX_SCAN_DEPTH {
            return Err(PoleError::Unresolved { count, center: region.center() });
        }
        let quarters = region.quarters();
        let mut counts = [0i64; 4];
        for (c, q) in counts.iter_mut().zip(quarters.iter()) {
            *c = self.winding(q)?;
        }
        if counts.iter().sum::<i64>() != count {
            return Err(PoleError::WindingNonIntegral { value: counts.iter().sum::<i64>() as f64 });
        }
        for (q, c) in quarters.into_iter().zip(counts) {
            self.resolve(q, c, depth + 1, out)?;
        }
        Ok(())
    }
}

/// All poles of `S` inside `region` at real energy `e`, sorted by `Re λ̃`.
pub fn scan_poles(params: &PotentialParams, e: f64, region: Region) -> Result<PoleScan, PoleError> {
    let kin = kinematics_real(params, e);
    let mut sc = Scanner { params, kin, e, cache: HashMap::new() };
    let winding = sc.winding(&region)?;
    if winding < 0 {
        return Err(PoleError::WindingNonIntegral { value: winding as f64 });
    }
    let mut poles = Vec::new();
    sc.resolve(region, winding, 0, &mut poles)?;
    poles.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re));
    Ok(PoleScan { poles, winding })
}

/// [`scan_poles`], retried on a slightly enlarged region up to `nudges`
/// times when a zero of `D₁` sits on the boundary.
pub fn scan_poles_nudged(params: &PotentialParams, e: f64, region: Region, nudges: usize) -> Result<PoleScan, PoleError> {
    let mut last = None;
    for attempt in 0..=nudges {
        let a = attempt as f64;
        let r = Region::new(region.re_min, region.re_max + 0.37 * a, region.im_min - 0.003 * a, region.im_max + 0.011 * a);
        match scan_poles(params, e, r) {
            Ok(scan) => return Ok(scan),
            Err(err @ PoleError::BoundaryZero { .. }) => last = Some(err),
            Err(err) => return Err(err),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn estimate_examples() {
        let p = PotentialParams::fig2();
        assert!((centrifugal_estimate(&p, 3.0, 3.0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((centrifugal_estimate(&p, 1.0, 0.0) - c(1.71205f64.sqrt(), 0.0)).norm() < 1e-12);
        let rm = p.r - 0.5 * p.d;
        let e_zero = -1.0 / (8.0 * rm * rm);
        assert!(centrifugal_estimate(&p, e_zero, 0.0).norm() < 1e-7);
        let below = centrifugal_estimate(&p, -10.0, 0.0);
        assert!(below.re.abs() < 1e-15 && below.im > 0.0);
    }

    #[test]
    fn impenetrable_levels_formula() {
        let p = PotentialParams::fig3();
        let l = impenetrable_levels(&p, 2);
        assert!((l[1] - (0.5 * (2.0 * PI / 0.29f64).powi(2) - 165.0)).abs() < 1e-12);
    }

    #[test]
    fn fig2_has_two_bound_states() {
        let p = PotentialParams::fig2();
        let levels = bound_state_energies(&p, 0.5).unwrap();
        assert_eq!(levels.len(), 2, "{levels:?}");
        assert!(levels[1] > -33.0 && levels[1] < 0.0);
        let st = bound_state(&p, 1).unwrap();
        assert!((st.e.re - levels[1]).abs() < 1e-9 && st.e.im.abs() < 1e-10);
    }

    #[test]
    fn fig3_metastable() {
        let p = PotentialParams::fig3();
        let st = lowest_metastable(&p).unwrap();
        let cls = classify_state(&st).unwrap();
        assert_eq!(cls.kind, TrajectoryKind::MetastableCorrelated);
        assert!(cls.e0 > 40.0 && cls.e0 < 69.7 && cls.gamma > 0.0, "{cls:?}");
    }

    #[test]
    fn far_seed_fails() {
        let p = PotentialParams::fig3();
        let r = find_regge_pole(&p, 5.0, c(40.0, 15.0));
        assert!(r.is_err());
    }

    #[test]
    fn empty_region_scan() {
        let p = PotentialParams::fig3();
        let s = scan_poles(&p, 5.0, Region::new(0.1, 0.6, 0.1, 0.4)).unwrap();
        assert_eq!(s.winding, 0);
        assert!(s.poles.is_empty());
    }
}
