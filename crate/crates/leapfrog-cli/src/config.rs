//! Flat `key=value` run configuration.
//!
//! A config file holds one assignment per line; `#` starts a comment. Keys
//! may appear at most once per file, unknown keys are rejected, and command
//! line overrides are applied on top before validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("invalid value for {key}: {value:?} ({reason})")]
    Invalid { key: String, value: String, reason: String },
    #[error("config says scenario={found} but the subcommand is {expected}")]
    ScenarioMismatch { expected: Scenario, found: Scenario },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Filaments,
    PeriodTable,
    Rings,
    KernelCheck,
    SpectralCheck,
    ModeoneScan,
    DivisorScan,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Filaments,
        Scenario::PeriodTable,
        Scenario::Rings,
        Scenario::KernelCheck,
        Scenario::SpectralCheck,
        Scenario::ModeoneScan,
        Scenario::DivisorScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Filaments => "filaments",
            Scenario::PeriodTable => "period-table",
            Scenario::Rings => "rings",
            Scenario::KernelCheck => "kernel-check",
            Scenario::SpectralCheck => "spectral-check",
            Scenario::ModeoneScan => "modeone-scan",
            Scenario::DivisorScan => "divisor-scan",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("expected one of {}", Scenario::ALL.map(Scenario::name).join(", ")))
    }
}

pub const KEYS: [&str; 17] = [
    "scenario",
    "epsilon",
    "kappa",
    "lambda",
    "lambda_min",
    "lambda_max",
    "lambda_points",
    "kappa_min",
    "kappa_max",
    "kappa_points",
    "dt_tol",
    "n_periods",
    "snapshots",
    "theta_points",
    "output_dir",
    "svg",
    "seed",
];

/// Raw assignments, in key order.
pub type Assignments = BTreeMap<String, String>;

/// Parse config text; duplicate and unknown keys are errors.
pub fn parse_text(text: &str) -> Result<Assignments, ConfigError> {
    let mut out = Assignments::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        check_key(k)?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::DuplicateKey(k.to_string()));
        }
    }
    Ok(out)
}

pub fn parse_file(path: &Path) -> Result<Assignments, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_text(&text)
}

fn check_key(k: &str) -> Result<(), ConfigError> {
    if KEYS.contains(&k) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(k.to_string()))
    }
}

/// `KEY=VALUE` from the command line.
pub fn parse_override(s: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Syntax {
        line: 0,
        text: s.to_string(),
    })?;
    let k = k.trim();
    check_key(k)?;
    Ok((k.to_string(), v.trim().to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.min + (self.max - self.min) * k as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub epsilon: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub lambda_range: Range,
    pub kappa_range: Range,
    /// Integrator tolerance.
    pub tol: f64,
    pub n_periods: usize,
    pub snapshots: usize,
    pub theta_points: usize,
    pub output_dir: PathBuf,
    pub svg: bool,
    pub seed: u64,
}

impl RunConfig {
    /// Defaults for `scenario` before any assignment is applied.
    pub fn defaults(scenario: Scenario) -> Self {
        let (lmin, lmax, lpts) = match scenario {
            Scenario::PeriodTable => (0.5, 2.0, 5),
            Scenario::ModeoneScan => (0.25, 4.0, 31),
            Scenario::DivisorScan => (0.5, 2.0, 2000),
            _ => (0.5, 2.0, 5),
        };
        Self {
            scenario,
            epsilon: 0.05,
            kappa: 0.4,
            lambda: 1.0,
            lambda_range: Range {
                min: lmin,
                max: lmax,
                points: lpts,
            },
            kappa_range: Range {
                min: 0.2,
                max: 1.0,
                points: 5,
            },
            tol: 1e-12,
            n_periods: 3,
            snapshots: 5,
            theta_points: 128,
            output_dir: PathBuf::from("out"),
            svg: true,
            seed: 0,
        }
    }

    /// Apply assignments to the scenario defaults and validate.
    pub fn build(scenario: Scenario, a: &Assignments) -> Result<Self, ConfigError> {
        if let Some(v) = a.get("scenario") {
            let found: Scenario = parse_value("scenario", v)?;
            if found != scenario {
                return Err(ConfigError::ScenarioMismatch {
                    expected: scenario,
                    found,
                });
            }
        }
        let mut c = Self::defaults(scenario);
        for (k, v) in a {
            match k.as_str() {
                "scenario" => {}
                "epsilon" => c.epsilon = parse_value(k, v)?,
                "kappa" => c.kappa = parse_value(k, v)?,
                "lambda" => c.lambda = parse_value(k, v)?,
                "lambda_min" => c.lambda_range.min = parse_value(k, v)?,
                "lambda_max" => c.lambda_range.max = parse_value(k, v)?,
                "lambda_points" => c.lambda_range.points = parse_value(k, v)?,
                "kappa_min" => c.kappa_range.min = parse_value(k, v)?,
                "kappa_max" => c.kappa_range.max = parse_value(k, v)?,
                "kappa_points" => c.kappa_range.points = parse_value(k, v)?,
                "dt_tol" => c.tol = parse_value(k, v)?,
                "n_periods" => c.n_periods = parse_value(k, v)?,
                "snapshots" => c.snapshots = parse_value(k, v)?,
                "theta_points" => c.theta_points = parse_value(k, v)?,
                "output_dir" => c.output_dir = PathBuf::from(v),
                "svg" => c.svg = parse_value(k, v)?,
                "seed" => c.seed = parse_value(k, v)?,
                _ => return Err(ConfigError::UnknownKey(k.clone())),
            }
        }
        c.validate(a)?;
        Ok(c)
    }

    fn validate(&self, a: &Assignments) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: &str| {
            let value = a.get(key).cloned().unwrap_or_else(|| "<default>".into());
            Err(ConfigError::Invalid {
                key: key.to_string(),
                value,
                reason: reason.to_string(),
            })
        };
        // |ln ε| > 1 is assumed throughout the scalings
        if !(self.epsilon > 0.0 && self.epsilon < (-1f64).exp()) {
            return bad("epsilon", "must lie in (0, 1/e)");
        }
        for (key, v) in [
            ("kappa", self.kappa),
            ("lambda", self.lambda),
            ("lambda_min", self.lambda_range.min),
            ("kappa_min", self.kappa_range.min),
            ("dt_tol", self.tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(key, "must be positive");
            }
        }
        for (name, r) in [("lambda", &self.lambda_range), ("kappa", &self.kappa_range)] {
            if r.points == 0 {
                return bad(&format!("{name}_points"), "must be at least 1");
            }
            if !(r.max.is_finite() && (r.max > r.min || (r.points == 1 && r.max >= r.min))) {
                return bad(&format!("{name}_max"), "range is empty");
            }
        }
        for (key, v, min) in [
            ("n_periods", self.n_periods, 1),
            ("snapshots", self.snapshots, 1),
            ("theta_points", self.theta_points, 8),
        ] {
            if v < min {
                return bad(key, &format!("must be at least {min}"));
            }
        }
        Ok(())
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e: T::Err| ConfigError::Invalid {
        key: key.to_string(),
        value: v.to_string(),
        reason: e.to_string(),
    })
}
