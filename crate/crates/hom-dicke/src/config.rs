//! Scan configuration and its flat `key = value` file format.
//!
//! Every field has exactly one key. [`ScanConfig::to_canonical_string`]
//! writes all keys in a fixed order with shortest round-trip floats, so two
//! configs are equal iff their canonical strings are equal.

use crate::biphoton::{BiphotonSpec, ExponentSign};
use crate::contour::QuadratureConfig;
use crate::dicke::ModelParams;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LambdaGrid {
    /// `count` evenly spaced values including both ends.
    Range { min: f64, max: f64, count: usize },
    List(Vec<f64>),
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            LambdaGrid::Range { min, max, count } => {
                match *count {
                    0 => return vec![],
                    1 => return vec![*min],
                    _ => {}
                }
                let h = (max - min) / (*count - 1) as f64;
                (0..*count).map(|k| if k + 1 == *count { *max } else { min + k as f64 * h }).collect()
            }
            LambdaGrid::List(v) => v.clone(),
        }
    }
}

/// Uniform delay grid `min, min + step, …` up to `max` (inclusive when it
/// lands on the grid).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl DelayGrid {
    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.min + k as f64 * self.step).collect()
    }
}

/// Settings of the Fourier analysis run alongside a λ-scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    /// Bandwidth parameter of the pair used for spectra; small so that
    /// `|F|²` is flat across all pole frequencies.
    pub b: f64,
    pub t_step: f64,
    /// Window length; `None` picks `12/κ`, or the end of the delay grid
    /// when `κ = 0`.
    pub t_max: Option<f64>,
    /// Remove the sample-independent two-photon dip before transforming.
    pub subtract_dip: bool,
    /// Peaks below this fraction of the maximum are ignored.
    pub peak_threshold: f64,
}

/// Fine λ-window around the critical coupling for pole trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalWindow {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Vertical offset added per trace in the `p_c_shifted` plotting column;
    /// zero leaves the column out.
    pub trace_offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Sample parameters; `lambda` is taken from the grid.
    pub model: ModelParams,
    pub biphoton: BiphotonSpec,
    pub lambda_grid: LambdaGrid,
    pub t_grid: DelayGrid,
    pub quadrature: QuadratureConfig,
    pub sign: ExponentSign,
    pub spectrum: SpectrumConfig,
    pub critical: CriticalWindow,
    pub output: OutputConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            model: ModelParams { omega_o: 1.5, omega_k: 1.5, kappa: 0.05, lambda: 0.0, n_emitters: 1 },
            biphoton: BiphotonSpec { omega_l: 1.5, b: 1.0 },
            lambda_grid: LambdaGrid::Range { min: 0.01, max: 1.3, count: 20 },
            t_grid: DelayGrid { min: -20.0, max: 60.0, step: 0.1 },
            quadrature: QuadratureConfig::default(),
            sign: ExponentSign::Plus,
            spectrum: SpectrumConfig { b: 0.01, t_step: 0.05, t_max: None, subtract_dip: true, peak_threshold: 0.1 },
            critical: CriticalWindow { half_width: 5e-4, points: 101 },
            output: OutputConfig { dir: PathBuf::from("hom-dicke-out"), trace_offset: 0.0 },
        }
    }
}

/// All keys, in canonical order.
pub const KEYS: &[&str] = &[
    "omega_o",
    "omega_k",
    "kappa",
    "n_emitters",
    "omega_l",
    "b",
    "lambda_min",
    "lambda_max",
    "lambda_count",
    "lambda_values",
    "t_min",
    "t_max",
    "t_step",
    "sign",
    "gauss_nodes",
    "oracle_tolerance",
    "q_grid",
    "q_epsilon",
    "merge_tol",
    "spectrum_b",
    "spectrum_t_step",
    "spectrum_t_max",
    "spectrum_subtract_dip",
    "spectrum_peak_threshold",
    "critical_half_width",
    "critical_points",
    "output_dir",
    "trace_offset",
];

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("bad value for {key}: {value:?}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl ScanConfig {
    /// Assign one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "omega_o" => self.model.omega_o = num(key, value)?,
            "omega_k" => self.model.omega_k = num(key, value)?,
            "kappa" => self.model.kappa = num(key, value)?,
            "n_emitters" => self.model.n_emitters = num(key, value)?,
            "omega_l" => self.biphoton.omega_l = num(key, value)?,
            "b" => self.biphoton.b = num(key, value)?,
            "lambda_min" | "lambda_max" | "lambda_count" => {
                let (mut min, mut max, mut count) = match &self.lambda_grid {
                    LambdaGrid::Range { min, max, count } => (*min, *max, *count),
                    LambdaGrid::List(_) => match ScanConfig::default().lambda_grid {
                        LambdaGrid::Range { min, max, count } => (min, max, count),
                        LambdaGrid::List(_) => unreachable!(),
                    },
                };
                match key {
                    "lambda_min" => min = num(key, value)?,
                    "lambda_max" => max = num(key, value)?,
                    _ => count = num(key, value)?,
                }
                self.lambda_grid = LambdaGrid::Range { min, max, count };
            }
            "lambda_values" => {
                if value.is_empty() {
                    if let LambdaGrid::List(_) = self.lambda_grid {
                        self.lambda_grid = ScanConfig::default().lambda_grid;
                    }
                } else {
                    let v = value.split(',').map(|s| num::<f64>(key, s.trim())).collect::<Result<Vec<_>>>()?;
                    self.lambda_grid = LambdaGrid::List(v);
                }
            }
            "t_min" => self.t_grid.min = num(key, value)?,
            "t_max" => self.t_grid.max = num(key, value)?,
            "t_step" => self.t_grid.step = num(key, value)?,
            "sign" => {
                self.sign = match value {
                    "plus" => ExponentSign::Plus,
                    "minus" => ExponentSign::Minus,
                    _ => return Err(bad(key, value)),
                }
            }
            "gauss_nodes" => self.quadrature.gauss_nodes = num(key, value)?,
            "oracle_tolerance" => self.quadrature.oracle_tolerance = num(key, value)?,
            "q_grid" => self.quadrature.q_grid = num(key, value)?,
            "q_epsilon" => self.quadrature.q_epsilon = num(key, value)?,
            "merge_tol" => self.quadrature.merge_tol = num(key, value)?,
            "spectrum_b" => self.spectrum.b = num(key, value)?,
            "spectrum_t_step" => self.spectrum.t_step = num(key, value)?,
            "spectrum_t_max" => {
                self.spectrum.t_max = if value == "auto" { None } else { Some(num(key, value)?) }
            }
            "spectrum_subtract_dip" => self.spectrum.subtract_dip = num(key, value)?,
            "spectrum_peak_threshold" => self.spectrum.peak_threshold = num(key, value)?,
            "critical_half_width" => self.critical.half_width = num(key, value)?,
            "critical_points" => self.critical.points = num(key, value)?,
            "output_dir" => self.output.dir = PathBuf::from(value),
            "trace_offset" => self.output.trace_offset = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Text form of one key.
    pub fn get(&self, key: &str) -> Result<String> {
        let range = match &self.lambda_grid {
            LambdaGrid::Range { min, max, count } => Some((*min, *max, *count)),
            LambdaGrid::List(_) => None,
        };
        let f = |x: f64| format!("{x:?}");
        Ok(match key {
            "omega_o" => f(self.model.omega_o),
            "omega_k" => f(self.model.omega_k),
            "kappa" => f(self.model.kappa),
            "n_emitters" => self.model.n_emitters.to_string(),
            "omega_l" => f(self.biphoton.omega_l),
            "b" => f(self.biphoton.b),
            "lambda_min" => range.map(|r| f(r.0)).unwrap_or_default(),
            "lambda_max" => range.map(|r| f(r.1)).unwrap_or_default(),
            "lambda_count" => range.map(|r| r.2.to_string()).unwrap_or_default(),
            "lambda_values" => match &self.lambda_grid {
                LambdaGrid::List(v) => fmt_list(v),
                LambdaGrid::Range { .. } => String::new(),
            },
            "t_min" => f(self.t_grid.min),
            "t_max" => f(self.t_grid.max),
            "t_step" => f(self.t_grid.step),
            "sign" => match self.sign {
                ExponentSign::Plus => "plus".into(),
                ExponentSign::Minus => "minus".into(),
            },
            "gauss_nodes" => self.quadrature.gauss_nodes.to_string(),
            "oracle_tolerance" => f(self.quadrature.oracle_tolerance),
            "q_grid" => self.quadrature.q_grid.to_string(),
            "q_epsilon" => f(self.quadrature.q_epsilon),
            "merge_tol" => f(self.quadrature.merge_tol),
            "spectrum_b" => f(self.spectrum.b),
            "spectrum_t_step" => f(self.spectrum.t_step),
            "spectrum_t_max" => self.spectrum.t_max.map(f).unwrap_or_else(|| "auto".into()),
            "spectrum_subtract_dip" => self.spectrum.subtract_dip.to_string(),
            "spectrum_peak_threshold" => f(self.spectrum.peak_threshold),
            "critical_half_width" => f(self.critical.half_width),
            "critical_points" => self.critical.points.to_string(),
            "output_dir" => self.output.dir.display().to_string(),
            "trace_offset" => f(self.output.trace_offset),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        })
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        for k in KEYS {
            let v = self.get(k).expect("listed key");
            if v.is_empty() {
                continue;
            }
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    /// Parse a config file body on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ScanConfig::default();
        let mut seen = HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if !seen.insert(k.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {k:?}", n + 1)));
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply `key=value` overrides in order.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<()> {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.lambda_grid.values()
    }

    pub fn params_at(&self, lambda: f64) -> ModelParams {
        self.model.with_lambda(lambda)
    }

    pub fn spec(&self) -> Result<BiphotonSpec> {
        BiphotonSpec::new(self.biphoton.omega_l, self.biphoton.b)
    }

    pub fn spectrum_spec(&self) -> Result<BiphotonSpec> {
        BiphotonSpec::new(self.biphoton.omega_l, self.spectrum.b)
    }

    pub fn spectrum_window(&self) -> f64 {
        match self.spectrum.t_max {
            Some(t) => t,
            None if self.model.kappa > 0.0 => 12.0 / self.model.kappa,
            None => self.t_grid.max,
        }
    }

    /// Positive-delay grid used for spectra.
    pub fn spectrum_grid(&self) -> Vec<f64> {
        let t = self.spectrum_window();
        let n = (t / self.spectrum.t_step).round() as usize;
        (0..n).map(|k| k as f64 * self.spectrum.t_step).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.model.with_lambda(0.0).validate().map_err(|e| Error::Config(e.to_string()))?;
        self.spec().map_err(|e| Error::Config(e.to_string()))?;
        self.spectrum_spec().map_err(|e| Error::Config(e.to_string()))?;
        self.quadrature.validate()?;
        let lam = self.lambdas();
        if lam.is_empty() || lam.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::Config("lambda grid must be non-empty and non-negative".into()));
        }
        if lam.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("lambda grid must be strictly increasing".into()));
        }
        let g = &self.t_grid;
        if !(g.min.is_finite() && g.max.is_finite() && g.step.is_finite() && g.step > 0.0 && g.max >= g.min) {
            return Err(Error::Config("delay grid needs t_min <= t_max and t_step > 0".into()));
        }
        let s = &self.spectrum;
        if !(s.t_step > 0.0 && s.t_step.is_finite()) {
            return Err(Error::Config("spectrum_t_step must be positive".into()));
        }
        if !(self.spectrum_window().is_finite()) || self.spectrum_grid().len() < 4 {
            return Err(Error::Config("spectrum window holds fewer than 4 samples".into()));
        }
        if !(s.peak_threshold > 0.0 && s.peak_threshold < 1.0) {
            return Err(Error::Config("spectrum_peak_threshold must lie in (0, 1)".into()));
        }
        if !(self.critical.half_width > 0.0) || self.critical.points < 2 {
            return Err(Error::Config("critical window needs half_width > 0 and at least 2 points".into()));
        }
        if !self.output.trace_offset.is_finite() {
            return Err(Error::Config("trace_offset must be finite".into()));
        }
        Ok(())
    }
}
