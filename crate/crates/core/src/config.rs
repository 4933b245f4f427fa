//! Flat `key = value` run configuration.
//!
//! Blank lines and everything after `#` are ignored. Keys may appear at
//! most once; unknown keys are rejected. Lists are comma separated, signal
//! terms are written `weight@shift`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::signal::SincTerm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SignalSpec {
    Terms(Vec<SincTerm>),
    /// Random sum of this many sinc atoms, drawn from the run seed.
    Random { terms: usize, spread: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub omega: f64,
    pub t0: f64,
    /// Number of derivative generators; defaults to the frame length
    /// implied by `omega` and `t0`.
    pub order: Option<usize>,
    pub signal: SignalSpec,
    pub window_radius: i64,
    /// Window used to assemble the known-sample term of the recovery
    /// system; defaults to `window_radius`.
    pub recovery_radius: Option<i64>,
    pub missing: Vec<i64>,
    pub lambda: Option<usize>,
    /// Indices whose samples are set to zero, without recovery, in the
    /// degradation comparison.
    pub zeroed: Vec<i64>,
    pub eval_from: f64,
    pub eval_to: f64,
    pub eval_points: usize,
    pub grid_density: f64,
    pub grid_points: usize,
    pub quad_tol: f64,
    pub cond_threshold: f64,
    pub dual_cond_threshold: f64,
    pub samples_file: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            omega: PI,
            t0: 1.25,
            order: None,
            signal: SignalSpec::Terms(vec![
                SincTerm { weight: 1.0, shift: 2.1 },
                SincTerm { weight: -0.7, shift: -1.7 },
            ]),
            window_radius: 60,
            recovery_radius: None,
            missing: (0..10).map(|k| -16 + 3 * k).collect(),
            lambda: None,
            zeroed: vec![4],
            eval_from: -10.0,
            eval_to: 10.0,
            eval_points: 401,
            grid_density: 64.0,
            grid_points: 256,
            quad_tol: 1e-12,
            cond_threshold: 1e10,
            dual_cond_threshold: 1e12,
            samples_file: None,
        }
    }
}

const KEYS: &[&str] = &[
    "omega",
    "t0",
    "order",
    "signal",
    "random_terms",
    "random_spread",
    "window_radius",
    "recovery_radius",
    "missing",
    "lambda",
    "zeroed",
    "eval_from",
    "eval_to",
    "eval_points",
    "grid_density",
    "grid_points",
    "quad_tol",
    "cond_threshold",
    "dual_cond_threshold",
    "samples_file",
];

fn parse_num<T: FromStr>(v: &str, key: &str, line: usize) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::Line { line, message: format!("{key}: cannot parse {v:?}") })
}

fn parse_list(v: &str, key: &str, line: usize) -> Result<Vec<i64>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(s, key, line))
        .collect()
}

fn parse_terms(v: &str, line: usize) -> Result<Vec<SincTerm>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|t| {
            let (w, s) = t.split_once('@').ok_or_else(|| ConfigError::Line {
                line,
                message: format!("signal: term {t:?} is not of the form weight@shift"),
            })?;
            Ok(SincTerm { weight: parse_num(w.trim(), "signal", line)?, shift: parse_num(s.trim(), "signal", line)? })
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses and validates a configuration text; unspecified keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeSet::new();
        let mut random_terms = None;
        let mut random_spread = None;
        let mut signal_line = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Line { line, message: format!("expected key = value, got {body:?}") })?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(ConfigError::Line { line, message: format!("unknown key {k:?}") });
            }
            if !seen.insert(k.to_string()) {
                return Err(ConfigError::Line { line, message: format!("duplicate key {k:?}") });
            }
            match k {
                "omega" => cfg.omega = parse_num(v, k, line)?,
                "t0" => cfg.t0 = parse_num(v, k, line)?,
                "order" => cfg.order = Some(parse_num(v, k, line)?),
                "signal" => {
                    cfg.signal = SignalSpec::Terms(parse_terms(v, line)?);
                    signal_line = Some(line);
                }
                "random_terms" => random_terms = Some((parse_num::<usize>(v, k, line)?, line)),
                "random_spread" => random_spread = Some(parse_num::<f64>(v, k, line)?),
                "window_radius" => cfg.window_radius = parse_num(v, k, line)?,
                "recovery_radius" => cfg.recovery_radius = Some(parse_num(v, k, line)?),
                "missing" => cfg.missing = parse_list(v, k, line)?,
                "lambda" => cfg.lambda = Some(parse_num(v, k, line)?),
                "zeroed" => cfg.zeroed = parse_list(v, k, line)?,
                "eval_from" => cfg.eval_from = parse_num(v, k, line)?,
                "eval_to" => cfg.eval_to = parse_num(v, k, line)?,
                "eval_points" => cfg.eval_points = parse_num(v, k, line)?,
                "grid_density" => cfg.grid_density = parse_num(v, k, line)?,
                "grid_points" => cfg.grid_points = parse_num(v, k, line)?,
                "quad_tol" => cfg.quad_tol = parse_num(v, k, line)?,
                "cond_threshold" => cfg.cond_threshold = parse_num(v, k, line)?,
                "dual_cond_threshold" => cfg.dual_cond_threshold = parse_num(v, k, line)?,
                "samples_file" => cfg.samples_file = Some(PathBuf::from(v)),
                _ => unreachable!(),
            }
        }
        match (random_terms, signal_line) {
            (Some((_, line)), Some(_)) => {
                return Err(ConfigError::Line { line, message: "random_terms and signal are exclusive".into() })
            }
            (Some((terms, _)), None) => {
                cfg.signal = SignalSpec::Random { terms, spread: random_spread.unwrap_or(10.0) };
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    /// Checks every numeric field before any computation runs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return bad(format!("omega must be positive and finite, got {}", self.omega));
        }
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return bad(format!("t0 must be positive and finite, got {}", self.t0));
        }
        if self.order == Some(0) {
            return bad("order must be at least 1".into());
        }
        if self.window_radius < 0 {
            return bad(format!("window_radius must be non-negative, got {}", self.window_radius));
        }
        if let Some(r) = self.recovery_radius {
            if r < self.window_radius {
                return bad(format!("recovery_radius {r} is smaller than window_radius {}", self.window_radius));
            }
        }
        if let SignalSpec::Random { terms, spread } = self.signal {
            if terms == 0 || !(spread.is_finite() && spread >= 0.0) {
                return bad("random_terms must be positive and random_spread non-negative".into());
            }
        }
        let distinct: BTreeSet<i64> = self.missing.iter().copied().collect();
        if distinct.len() != self.missing.len() {
            return bad("missing indices must be distinct".into());
        }
        if let Some(&n) = self.missing.iter().chain(&self.zeroed).find(|n| n.abs() > self.window_radius) {
            return bad(format!("index {n} lies outside the window of radius {}", self.window_radius));
        }
        if self.lambda == Some(0) {
            return bad("lambda must be at least 1".into());
        }
        if !(self.eval_from.is_finite() && self.eval_to.is_finite() && self.eval_from < self.eval_to) {
            return bad(format!("evaluation interval [{}, {}] is empty", self.eval_from, self.eval_to));
        }
        if self.eval_points == 0 {
            return bad("eval_points must be positive".into());
        }
        if !(self.grid_density.is_finite() && self.grid_density > 0.0) {
            return bad(format!("grid_density must be positive, got {}", self.grid_density));
        }
        if self.grid_points < 8 {
            return bad(format!("grid_points must be at least 8, got {}", self.grid_points));
        }
        if !(self.quad_tol.is_finite() && self.quad_tol > 0.0) {
            return bad(format!("quad_tol must be positive, got {}", self.quad_tol));
        }
        if !(self.cond_threshold > 1.0 && self.dual_cond_threshold > 1.0) {
            return bad("condition thresholds must exceed 1".into());
        }
        Ok(())
    }

    pub fn recovery_window(&self) -> i64 {
        self.recovery_radius.unwrap_or(self.window_radius)
    }
}
