//! Run configuration in a flat `section.key = value` text format.
//!
//! ```text
//! # Fig. 2 parameters
//! model.v = 165
//! model.omega = 0.5
//! energy.min = 0.5
//! energy.max = 20
//! energy.count = 40
//! seeds.level = bound:1
//! ```
//!
//! Lines starting with `#` are comments. Every key is optional and falls
//! back to [`RunConfig::default`]; unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use regge_core::model::PotentialParams;
use regge_core::poles::{LevelSelector, Region};
use regge_core::xsec::XsecSettings;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("`{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}` (expected fig2, fig3, fig4 or fig5)")]
    UnknownPreset(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl EnergyGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `|γ|` below this classifies a `λ = 1/2` level as bound.
    pub pole_tol: f64,
    pub quad_tol: f64,
    pub tail_tol: f64,
    pub pole_im_cutoff: f64,
    pub modified_im_cutoff: f64,
}

impl Tolerances {
    pub fn xsec_settings(&self) -> XsecSettings {
        XsecSettings {
            tail_tol: self.tail_tol,
            quad_tol: self.quad_tol,
            pole_im_cutoff: self.pole_im_cutoff,
            modified_im_cutoff: self.modified_im_cutoff,
            ..XsecSettings::default()
        }
    }
}

/// Which `λ = 1/2` level the trajectory belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelChoice {
    /// The highest bound state, or the lowest metastable one if none is bound.
    Auto,
    Bound(usize),
    Metastable(usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Seeds {
    pub lambda: Vec<Complex64>,
    pub energy: Vec<f64>,
    pub level: Option<LevelChoice>,
}

impl Seeds {
    /// Level selector for the solver; an explicit energy seed wins.
    pub fn selector(&self, params: &PotentialParams) -> Result<LevelSelector, regge_core::poles::PoleError> {
        if let Some(&e) = self.energy.first() {
            return Ok(LevelSelector::Seed(e));
        }
        Ok(match self.level.unwrap_or(LevelChoice::Auto) {
            LevelChoice::Bound(i) => LevelSelector::Bound(i),
            LevelChoice::Metastable(i) => LevelSelector::Metastable(i),
            LevelChoice::Auto => {
                let bound = regge_core::poles::bound_state_energies(params, 0.5)?;
                match bound.len() {
                    0 => LevelSelector::Metastable(0),
                    n => LevelSelector::Bound(n - 1),
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: PotentialParams,
    pub energy_grid: EnergyGrid,
    pub scan_region: Region,
    pub tolerances: Tolerances,
    pub seeds: Seeds,
    pub output_path: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let xs = XsecSettings::default();
        RunConfig {
            model: PotentialParams::fig2(),
            energy_grid: EnergyGrid { min: 0.5, max: 50.0, count: 50, spacing: Spacing::Linear },
            scan_region: Region::new(0.0, 20.0, -0.01, 3.0),
            tolerances: Tolerances {
                pole_tol: 1e-9,
                quad_tol: xs.quad_tol,
                tail_tol: xs.tail_tol,
                pole_im_cutoff: xs.pole_im_cutoff,
                modified_im_cutoff: xs.modified_im_cutoff,
            },
            seeds: Seeds::default(),
            output_path: None,
        }
    }
}

const KEYS: &[&str] = &[
    "model.v",
    "model.r",
    "model.d",
    "model.omega",
    "energy.min",
    "energy.max",
    "energy.count",
    "energy.spacing",
    "scan.re_min",
    "scan.re_max",
    "scan.im_min",
    "scan.im_max",
    "tolerances.pole_tol",
    "tolerances.quad_tol",
    "tolerances.tail_tol",
    "tolerances.pole_im_cutoff",
    "tolerances.modified_im_cutoff",
    "seeds.lambda",
    "seeds.energy",
    "seeds.level",
    "output.path",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: v.into() })
}

/// `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (body[..j].parse().ok()?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().ok()?,
    };
    Some(Complex64::new(re, im))
}

fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}i", z.re, z.im.abs())
}

fn parse_level(s: &str) -> Option<LevelChoice> {
    if s == "auto" {
        return Some(LevelChoice::Auto);
    }
    let (kind, idx) = s.split_once(':')?;
    let idx = idx.trim().parse().ok()?;
    match kind.trim() {
        "bound" => Some(LevelChoice::Bound(idx)),
        "metastable" => Some(LevelChoice::Metastable(idx)),
        _ => None,
    }
}

fn list<T>(key: &str, v: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| f(x).ok_or_else(|| ConfigError::BadValue { key: key.into(), value: x.into() }))
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut seen = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: n + 1, message: format!("expected `key = value`, got `{line}`") })?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey(k.into()));
            }
            if seen.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate(k.into()));
            }
        }
        let mut c = RunConfig::default();
        for (k, v) in &seen {
            let v = v.as_str();
            match k.as_str() {
                "model.v" => c.model.v = num(k, v)?,
                "model.r" => c.model.r = num(k, v)?,
                "model.d" => c.model.d = num(k, v)?,
                "model.omega" => c.model.omega = num(k, v)?,
                "energy.min" => c.energy_grid.min = num(k, v)?,
                "energy.max" => c.energy_grid.max = num(k, v)?,
                "energy.count" => c.energy_grid.count = num(k, v)?,
                "energy.spacing" => {
                    c.energy_grid.spacing = match v {
                        "linear" => Spacing::Linear,
                        "log" => Spacing::Log,
                        _ => return Err(ConfigError::BadValue { key: k.clone(), value: v.into() }),
                    }
                }
                "scan.re_min" => c.scan_region.re_min = num(k, v)?,
                "scan.re_max" => c.scan_region.re_max = num(k, v)?,
                "scan.im_min" => c.scan_region.im_min = num(k, v)?,
                "scan.im_max" => c.scan_region.im_max = num(k, v)?,
                "tolerances.pole_tol" => c.tolerances.pole_tol = num(k, v)?,
                "tolerances.quad_tol" => c.tolerances.quad_tol = num(k, v)?,
                "tolerances.tail_tol" => c.tolerances.tail_tol = num(k, v)?,
                "tolerances.pole_im_cutoff" => c.tolerances.pole_im_cutoff = num(k, v)?,
                "tolerances.modified_im_cutoff" => c.tolerances.modified_im_cutoff = num(k, v)?,
                "seeds.lambda" => c.seeds.lambda = list(k, v, parse_complex)?,
                "seeds.energy" => c.seeds.energy = list(k, v, |x| x.parse().ok())?,
                "seeds.level" => {
                    c.seeds.level = Some(parse_level(v).ok_or_else(|| ConfigError::BadValue { key: k.clone(), value: v.into() })?)
                }
                "output.path" => c.output_path = Some(v.to_string()),
                _ => unreachable!("key list checked above"),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let g = &self.energy_grid;
        if !(g.min < g.max) || !g.min.is_finite() || !g.max.is_finite() {
            return Err(ConfigError::Invalid(format!("energy.min = {} must be below energy.max = {}", g.min, g.max)));
        }
        if g.count < 2 {
            return Err(ConfigError::Invalid(format!("energy.count = {} must be at least 2", g.count)));
        }
        if g.spacing == Spacing::Log && g.min <= 0.0 {
            return Err(ConfigError::Invalid("log spacing needs energy.min > 0".into()));
        }
        let r = &self.scan_region;
        if !(r.re_min < r.re_max && r.im_min < r.im_max) {
            return Err(ConfigError::Invalid(format!("scan region {r:?} is empty or inverted")));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("pole_tol", t.pole_tol),
            ("quad_tol", t.quad_tol),
            ("tail_tol", t.tail_tol),
            ("pole_im_cutoff", t.pole_im_cutoff),
            ("modified_im_cutoff", t.modified_im_cutoff),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("tolerances.{name} = {v} must be positive")));
            }
        }
        if self.seeds.lambda.iter().any(|z| !z.norm().is_finite()) || self.seeds.energy.iter().any(|e| !e.is_finite()) {
            return Err(ConfigError::Invalid("seeds must be finite".into()));
        }
        Ok(())
    }

    /// Every key, in a form [`RunConfig::parse`] reads back exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("model.v", format!("{:?}", self.model.v));
        put("model.r", format!("{:?}", self.model.r));
        put("model.d", format!("{:?}", self.model.d));
        put("model.omega", format!("{:?}", self.model.omega));
        put("energy.min", format!("{:?}", self.energy_grid.min));
        put("energy.max", format!("{:?}", self.energy_grid.max));
        put("energy.count", self.energy_grid.count.to_string());
        put("energy.spacing", if self.energy_grid.spacing == Spacing::Log { "log" } else { "linear" }.into());
        put("scan.re_min", format!("{:?}", self.scan_region.re_min));
        put("scan.re_max", format!("{:?}", self.scan_region.re_max));
        put("scan.im_min", format!("{:?}", self.scan_region.im_min));
        put("scan.im_max", format!("{:?}", self.scan_region.im_max));
        let t = &self.tolerances;
        put("tolerances.pole_tol", format!("{:?}", t.pole_tol));
        put("tolerances.quad_tol", format!("{:?}", t.quad_tol));
        put("tolerances.tail_tol", format!("{:?}", t.tail_tol));
        put("tolerances.pole_im_cutoff", format!("{:?}", t.pole_im_cutoff));
        put("tolerances.modified_im_cutoff", format!("{:?}", t.modified_im_cutoff));
        if !self.seeds.lambda.is_empty() {
            put("seeds.lambda", self.seeds.lambda.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(", "));
        }
        if !self.seeds.energy.is_empty() {
            put("seeds.energy", self.seeds.energy.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>().join(", "));
        }
        if let Some(level) = self.seeds.level {
            put(
                "seeds.level",
                match level {
                    LevelChoice::Auto => "auto".into(),
                    LevelChoice::Bound(i) => format!("bound:{i}"),
                    LevelChoice::Metastable(i) => format!("metastable:{i}"),
                },
            );
        }
        if let Some(p) = &self.output_path {
            put("output.path", p.clone());
        }
        s
    }

    pub fn load(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.into(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let text = match name {
            "fig2" => include_str!("../presets/fig2.conf"),
            "fig3" => include_str!("../presets/fig3.conf"),
            "fig4" => include_str!("../presets/fig4.conf"),
            "fig5" => include_str!("../presets/fig5.conf"),
            other => return Err(ConfigError::UnknownPreset(other.into())),
        };
        Self::parse(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5+2i"), Some(Complex64::new(1.5, 2.0)));
        assert_eq!(parse_complex("1e-3-2.5e+1i"), Some(Complex64::new(1e-3, -25.0)));
        assert_eq!(parse_complex("-i"), Some(Complex64::new(0.0, -1.0)));
        assert_eq!(parse_complex("-3"), Some(Complex64::new(-3.0, 0.0)));
        assert_eq!(parse_complex("x+i"), None);
        let z = Complex64::new(-0.1, -0.0);
        assert_eq!(parse_complex(&fmt_complex(z)).unwrap().im.to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("model.q = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RunConfig::parse("model.v = 1\nmodel.v = 2"), Err(ConfigError::Duplicate(_))));
        assert!(matches!(RunConfig::parse("model.d = 1.0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(RunConfig::parse("energy.count = 1"), Err(ConfigError::Invalid(_))));
        assert!(matches!(RunConfig::parse("just text"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(RunConfig::parse("seeds.level = deep:1"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn grid_spacing() {
        let g = EnergyGrid { min: 1.0, max: 100.0, count: 3, spacing: Spacing::Log };
        let p = g.points();
        assert!((p[1] - 10.0).abs() < 1e-12);
        let g = EnergyGrid { spacing: Spacing::Linear, ..g };
        assert_eq!(g.points(), vec![1.0, 50.5, 100.0]);
    }

    #[test]
    fn presets_parse() {
        for name in ["fig2", "fig3", "fig4", "fig5"] {
            let c = RunConfig::preset(name).unwrap();
            assert_eq!(RunConfig::parse(&c.serialize()).unwrap(), c);
        }
        assert!(RunConfig::preset("fig9").is_err());
    }
}
