//! Subcommands. Each returns its full text output; numerical failures carry
//! whatever rows were finished so the caller can still write them.

use rayon::prelude::*;
use regge_core::poles::{self, PoleError, ReggePole, TrajectoryClass};
use regge_core::verify::{self, OracleReport};
use regge_core::xsec::{self, MulhollandDecomposition, XsecError};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::csv::Table;

/// Relative closure defects above this flag missed poles.
pub const CLOSURE_LIMIT: f64 = 1e-3;
const SCAN_NUDGES: usize = 3;
/// Largest energy step when walking from a level to the first grid point.
const APPROACH_STEP: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{message}")]
    Numerical { message: String, partial: Option<String> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical { .. } => 2,
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError::Numerical { message: message.into(), partial: None }
    }
}

impl From<PoleError> for CliError {
    fn from(e: PoleError) -> Self {
        CliError::numerical(e.to_string())
    }
}

impl From<XsecError> for CliError {
    fn from(e: XsecError) -> Self {
        CliError::numerical(e.to_string())
    }
}

pub fn classify(cfg: &RunConfig) -> Result<TrajectoryClass, CliError> {
    let sel = cfg.seeds.selector(&cfg.model)?;
    let st = poles::find_level(&cfg.model, sel)?;
    Ok(poles::classify_state_tol(&st, cfg.tolerances.pole_tol)?)
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<String, CliError> {
    let c = classify(cfg)?;
    Ok(format!("{}\n{}, E0={:.14e}, gamma={:.14e}\n", c.kind.heading(), c.kind.label(), c.e0, c.gamma))
}

pub const TRAJECTORY_COLUMNS: &[&str] =
    &["E", "Re_lambda", "Im_lambda", "Re_rho", "Im_rho", "est_Re_lambda", "est_Im_lambda"];

/// Trajectory samples on the grid, or the ones finished before continuation was lost.
pub fn trajectory_samples(cfg: &RunConfig) -> Result<(Vec<ReggePole>, f64), (Vec<ReggePole>, CliError)> {
    let p = &cfg.model;
    let grid = cfg.energy_grid.points();
    let st = cfg
        .seeds
        .selector(p)
        .and_then(|sel| poles::find_level(p, sel))
        .map_err(|e| (Vec::new(), e.into()))?;
    let e0 = st.e.re;
    let seed = match cfg.seeds.lambda.first() {
        Some(&l) => l,
        None => {
            let start = poles::regge_pole_from_level(p, &st).map_err(|e| (Vec::new(), e.into()))?;
            let n = ((grid[0] - e0).abs() / APPROACH_STEP).ceil().max(1.0) as usize;
            let path: Vec<f64> = (0..=n).map(|i| e0 + (grid[0] - e0) * i as f64 / n as f64).collect();
            let walk = poles::trace_regge_trajectory(p, &path, start.lambda)
                .map_err(|(_, e)| (Vec::new(), CliError::numerical(format!("approach from E0 = {e0}: {e}"))))?;
            walk.samples.last().expect("non-empty path").lambda
        }
    };
    match poles::trace_regge_trajectory(p, &grid, seed) {
        Ok(t) => Ok((t.samples, e0)),
        Err((t, e)) => {
            let msg = format!("{e}; {} of {} rows completed", t.samples.len(), grid.len());
            Err((t.samples, CliError::numerical(msg)))
        }
    }
}

fn trajectory_table(cfg: &RunConfig, samples: &[ReggePole], e0: f64) -> Table {
    let mut t = Table::new(TRAJECTORY_COLUMNS);
    for s in samples {
        let est = poles::centrifugal_estimate(&cfg.model, s.e, e0);
        t.push(&[s.e, s.lambda.re, s.lambda.im, s.residue.re, s.residue.im, est.re, est.im]);
    }
    t
}

pub fn cmd_trajectory(cfg: &RunConfig) -> Result<String, CliError> {
    match trajectory_samples(cfg) {
        Ok((s, e0)) => Ok(trajectory_table(cfg, &s, e0).render()),
        Err((s, CliError::Numerical { message, .. })) if !s.is_empty() => {
            // the estimate columns need E0, which was found before the trace ran
            let e0 = cfg.seeds.selector(&cfg.model).and_then(|sel| poles::find_level(&cfg.model, sel)).map(|st| st.e.re);
            let partial = e0.ok().map(|e0| trajectory_table(cfg, &s, e0).render());
            Err(CliError::Numerical { message, partial })
        }
        Err((_, e)) => Err(e),
    }
}

pub const DECOMPOSE_COLUMNS: &[&str] = &[
    "E",
    "sigma_total",
    "sigma1",
    "sigma_res",
    "sigma2",
    "sigma1_mod",
    "sigma_res_mod",
    "sigma_res_n0",
    "sigma_res_n1",
    "sigma_res_n2",
    "closure_defect",
    "direct_orig",
    "direct_mod",
    "sigma_hard_R",
];

#[derive(Debug, Clone)]
pub struct DecomposeRow {
    pub decomposition: MulhollandDecomposition,
    pub poles: Vec<ReggePole>,
    pub sigma_hard: f64,
}

impl DecomposeRow {
    pub fn values(&self) -> [f64; 14] {
        let d = &self.decomposition;
        [
            d.e,
            d.sigma_total,
            d.sigma1,
            d.sigma_res,
            d.sigma2,
            d.sigma1_mod,
            d.sigma_res_mod,
            d.n0_moved,
            d.rotation_sum(1),
            d.rotation_sum(2),
            d.closure_defect,
            d.sigma_total - d.sigma_res,
            d.sigma_total - d.sigma_res_mod,
            self.sigma_hard,
        ]
    }
}

/// One decomposition per grid energy, computed concurrently, in grid order.
pub fn decompose_rows(cfg: &RunConfig) -> Result<Vec<DecomposeRow>, CliError> {
    if cfg.energy_grid.min <= 0.0 {
        return Err(ConfigError::Invalid(format!("decompose needs energy.min > 0, got {}", cfg.energy_grid.min)).into());
    }
    let settings = cfg.tolerances.xsec_settings();
    let p = cfg.model;
    cfg.energy_grid
        .points()
        .par_iter()
        .map(|&e| {
            let (decomposition, poles) = xsec::decompose(&p, e, &settings).map_err(|err| (e, err))?;
            let sigma_hard = xsec::sigma_hard_sphere(&p, e, settings.tail_tol).map_err(|err| (e, err))?;
            Ok(DecomposeRow { decomposition, poles, sigma_hard })
        })
        .collect::<Vec<Result<_, (f64, XsecError)>>>()
        .into_iter()
        .map(|r| r.map_err(|(e, err)| CliError::numerical(format!("E = {e}: {err}"))))
        .collect()
}

pub fn decompose_table(rows: &[DecomposeRow]) -> Table {
    let mut t = Table::new(DECOMPOSE_COLUMNS);
    for r in rows {
        t.push(&r.values());
    }
    t
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = decompose_rows(cfg)?;
    let text = decompose_table(&rows).render();
    if let Some(bad) = rows.iter().find(|r| r.decomposition.relative_closure_defect() > CLOSURE_LIMIT) {
        let d = &bad.decomposition;
        return Err(CliError::Numerical {
            message: format!("closure defect {:e} at E = {} exceeds {CLOSURE_LIMIT:e}; poles may be missing", d.relative_closure_defect(), d.e),
            partial: Some(text),
        });
    }
    Ok(text)
}

pub const POLES_COLUMNS: &[&str] = &["E", "Re_lambda", "Im_lambda", "Re_rho", "Im_rho", "winding_checksum"];

pub fn cmd_poles(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.model;
    let region = cfg.scan_region;
    let scans = cfg
        .energy_grid
        .points()
        .par_iter()
        .map(|&e| {
            if e == 0.0 {
                return Err(CliError::numerical("E = 0 is a branch point"));
            }
            poles::scan_poles_nudged(&p, e, region, SCAN_NUDGES)
                .map(|s| (e, s))
                .map_err(|err| CliError::numerical(format!("E = {e}: {err}")))
        })
        .collect::<Vec<_>>();
    let mut t = Table::new(POLES_COLUMNS);
    for scan in scans {
        let (e, scan) = scan?;
        for pole in &scan.poles {
            t.push(&[e, pole.lambda.re, pole.lambda.im, pole.residue.re, pole.residue.im, scan.winding as f64]);
        }
    }
    Ok(t.render())
}

pub fn reports_table(reports: &[OracleReport]) -> String {
    let mut s = String::from(OracleReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// The standard oracle battery. A failed comparison is a numerical failure,
/// with the full report attached.
pub fn cmd_verify(_cfg: &RunConfig) -> Result<String, CliError> {
    let reports = verify::standard_battery();
    let text = reports_table(&reports);
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Numerical { message: format!("{failed} of {} oracle checks failed", reports.len()), partial: Some(text) });
    }
    Ok(text)
}
