//! λ-scans of the coincidence rate, Fourier-cosine spectra and pole
//! trajectories.

use crate::biphoton::{BiphotonSpec, CoincidenceModel, CoincidenceTrace, TraceMeta};
use crate::config::ScanConfig;
use crate::contour::QuadratureConfig;
use crate::dicke::{critical_coupling, select_branch, Branch, ModelParams, PolaritonSpectrum, SteadyState};
use crate::response::{find_poles, ResponseFunction};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A λ that was left out of a scan, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub lambda: f64,
    pub reason: String,
}

/// Sample on its selected branch at one coupling.
#[derive(Clone, Debug)]
pub struct Sample {
    pub params: ModelParams,
    pub state: SteadyState,
    pub spectrum: PolaritonSpectrum,
    pub response: ResponseFunction,
}

impl Sample {
    pub fn at(cfg: &ScanConfig, lambda: f64) -> Result<Self> {
        let params = cfg.params_at(lambda);
        let (state, spectrum) = select_branch(&params)?;
        let response = ResponseFunction::for_state(&params, &state)?;
        Ok(Sample { params, state, spectrum, response })
    }

    pub fn model(&self, spec: BiphotonSpec, cfg: &ScanConfig) -> Result<CoincidenceModel> {
        Ok(CoincidenceModel::new(self.response.clone(), spec, cfg.quadrature)?.with_sign(cfg.sign))
    }

    pub fn meta(&self, spec: BiphotonSpec) -> TraceMeta {
        TraceMeta { params: Some(self.params), branch: Some(self.state.branch), spec }
    }
}

#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub lambda: f64,
    pub branch: Branch,
    /// Poles of the response, `Im p > 0`.
    pub response_poles: Vec<C64>,
    /// Poles `ρ` of the spectral product.
    pub product_poles: Vec<C64>,
    pub trace: CoincidenceTrace,
    /// Largest change of `p_c` at a few delays when the quadrature is refined.
    pub quadrature_error: f64,
}

#[derive(Clone, Debug, Default)]
pub struct LambdaScan {
    pub points: Vec<ScanPoint>,
    pub skipped: Vec<Skipped>,
}

fn refined(q: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { gauss_nodes: q.gauss_nodes + 100, q_grid: 2 * q.q_grid, ..*q }
}

/// Is this error a property of the sample at this λ rather than a failure
/// of the run?
fn skippable(e: &Error) -> bool {
    matches!(e, Error::BranchUnavailable(_) | Error::UnstableBranch(_) | Error::NearSingular(_))
}

/// Coincidence trace on the configured delay grid for every λ.
pub fn run_lambda_scan(cfg: &ScanConfig) -> Result<LambdaScan> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let grid = cfg.t_grid.values();
    let probe = [grid[0], 0.0f64.clamp(grid[0], *grid.last().unwrap()), *grid.last().unwrap()];
    let mut out = LambdaScan::default();
    for lambda in cfg.lambdas() {
        let sample = match Sample::at(cfg, lambda) {
            Ok(s) => s,
            Err(e) if skippable(&e) => {
                out.skipped.push(Skipped { lambda, reason: e.to_string() });
                continue;
            }
            Err(e) => return Err(e),
        };
        let model = sample.model(spec, cfg)?;
        let trace = model.trace(&grid, sample.meta(spec))?;
        let fine = CoincidenceModel::new(sample.response.clone(), spec, refined(&cfg.quadrature))?.with_sign(cfg.sign);
        let mut quadrature_error: f64 = 0.0;
        for &t in &probe {
            quadrature_error = quadrature_error.max((model.probability(t)? - fine.probability(t)?).abs());
        }
        out.points.push(ScanPoint {
            lambda,
            branch: sample.state.branch,
            response_poles: sample.response.poles().to_vec(),
            product_poles: model.poles.rho(),
            trace,
            quadrature_error,
        });
    }
    Ok(out)
}

/// Magnitude of the Fourier-cosine transform of a coincidence trace.
///
/// The frequency axis is the photon detuning `ω` of the pair, so a term
/// `e^{2iρt}` of the trace shows up near `ω = Re ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralTrace {
    pub omega_grid: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// Real parts of the spectral-product poles, when the trace carries
    /// enough metadata to rebuild them.
    pub pole_overlay: Vec<f64>,
    pub lambda: Option<f64>,
    /// Frequency grid spacing.
    pub bin: f64,
    pub subtract_dip: bool,
}

impl SpectralTrace {
    /// Overlay value closest to `omega`.
    pub fn nearest_pole_re(&self, omega: f64) -> Option<f64> {
        self.pole_overlay
            .iter()
            .copied()
            .min_by(|a, b| (a - omega).abs().total_cmp(&(b - omega).abs()))
    }

    /// Indices of interior local maxima above `threshold × max`.
    pub fn peaks(&self, threshold: f64) -> Vec<usize> {
        let m = &self.magnitude;
        let max = m.iter().copied().fold(0.0, f64::max);
        (1..m.len().saturating_sub(1))
            .filter(|&k| m[k] > m[k - 1] && m[k] >= m[k + 1] && m[k] > threshold * max)
            .collect()
    }
}

fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::NonUniformGrid);
    }
    let h = t[1] - t[0];
    if !(h > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::NonUniformGrid);
    }
    Ok(h)
}

/// `|Δt Σ_j w_j y_j cos(2ω t_j)|` over the samples with `t ≥ 0`, where
/// `y = p_c − background` (minus the two-photon dip when `subtract_dip`) and
/// `w_j = ½` for a sample at `t = 0`. The grid `ω_k = kπ/(NΔt)` runs up to
/// the Nyquist frequency `π/(2Δt)`.
pub fn fourier_cosine_transform(trace: &CoincidenceTrace, subtract_dip: bool) -> Result<SpectralTrace> {
    uniform_step(&trace.t_delay)?;
    let start = trace.t_delay.iter().position(|&t| t >= -1e-12).ok_or(Error::NonUniformGrid)?;
    let t = &trace.t_delay[start..];
    let dt = uniform_step(t)?;
    let y: Vec<f64> = (start..trace.t_delay.len())
        .map(|j| {
            let v = trace.p_c[j] - trace.background;
            if subtract_dip {
                v - trace.dip[j]
            } else {
                v
            }
        })
        .collect();
    let n = t.len();
    let bin = PI / (n as f64 * dt);
    let omega_grid: Vec<f64> = (0..=n / 2).map(|k| k as f64 * bin).collect();
    let magnitude = omega_grid
        .iter()
        .map(|&w| {
            let s: f64 = t
                .iter()
                .zip(&y)
                .map(|(&tj, &yj)| {
                    let wt = if tj.abs() < 1e-12 { 0.5 } else { 1.0 };
                    wt * yj * (2.0 * w * tj).cos()
                })
                .sum();
            (s * dt).abs()
        })
        .collect();
    let pole_overlay = match (&trace.meta.params, trace.meta.branch) {
        (Some(p), Some(branch)) => {
            let ss = crate::dicke::steady_state(p, branch)?;
            let r = ResponseFunction::for_state(p, &ss)?;
            find_poles(&r, trace.meta.spec.omega_l, crate::response::MERGE_TOL)?.rho().iter().map(|r| r.re).collect()
        }
        _ => vec![],
    };
    Ok(SpectralTrace {
        omega_grid,
        magnitude,
        pole_overlay,
        lambda: trace.meta.params.map(|p| p.lambda),
        bin,
        subtract_dip,
    })
}

/// Frequencies a peak may sit at: every `|Re ρ_i|` and `|Re ρ_i ± Re ρ_j|`.
pub fn pole_frequencies(re: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = re.iter().map(|x| x.abs()).collect();
    for a in re {
        for b in re {
            out.push((a + b).abs());
            out.push((a - b).abs());
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

/// Distance in bins from each peak to the nearest pole-derived frequency.
pub fn peak_alignment(s: &SpectralTrace, threshold: f64) -> Vec<(f64, f64)> {
    let cand = pole_frequencies(&s.pole_overlay);
    s.peaks(threshold)
        .into_iter()
        .map(|k| {
            let w = s.omega_grid[k];
            let d = cand.iter().map(|c| (c - w).abs()).fold(f64::INFINITY, f64::min);
            (w, d / s.bin)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SpectrumPoint {
    pub lambda: f64,
    pub spectrum: SpectralTrace,
}

/// Spectra over the λ grid, each from a positive-delay trace taken with the
/// broadband pair and the window of the config.
pub fn run_spectrum_scan(cfg: &ScanConfig) -> Result<(Vec<SpectrumPoint>, Vec<Skipped>)> {
    cfg.validate()?;
    let spec = cfg.spectrum_spec()?;
    let grid = cfg.spectrum_grid();
    let mut out = vec![];
    let mut skipped = vec![];
    for lambda in cfg.lambdas() {
        let sample = match Sample::at(cfg, lambda) {
            Ok(s) => s,
            Err(e) if skippable(&e) => {
                skipped.push(Skipped { lambda, reason: e.to_string() });
                continue;
            }
            Err(e) => return Err(e),
        };
        let trace = sample.model(spec, cfg)?.trace(&grid, sample.meta(spec))?;
        out.push(SpectrumPoint { lambda, spectrum: fourier_cosine_transform(&trace, cfg.spectrum.subtract_dip)? });
    }
    Ok((out, skipped))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleRow {
    pub lambda: f64,
    pub branch: Branch,
    pub response_poles: Vec<C64>,
    pub product_poles: Vec<C64>,
}

/// λ values of the grid merged with the fine window around `λ_c`.
pub fn trajectory_lambdas(cfg: &ScanConfig) -> Vec<f64> {
    let lc = critical_coupling(&cfg.model);
    let w = cfg.critical;
    let mut l = cfg.lambdas();
    for k in 0..w.points {
        let x = lc - w.half_width + 2.0 * w.half_width * k as f64 / (w.points - 1) as f64;
        if x >= 0.0 {
            l.push(x);
        }
    }
    l.sort_by(f64::total_cmp);
    l.dedup();
    l
}

/// Pole locations on the selected branch for every λ of
/// [`trajectory_lambdas`].
pub fn pole_trajectories(cfg: &ScanConfig) -> Result<(Vec<PoleRow>, Vec<Skipped>)> {
    cfg.validate()?;
    let mut rows = vec![];
    let mut skipped = vec![];
    for lambda in trajectory_lambdas(cfg) {
        let sample = match Sample::at(cfg, lambda) {
            Ok(s) => s,
            Err(e) if skippable(&e) => {
                skipped.push(Skipped { lambda, reason: e.to_string() });
                continue;
            }
            Err(e) => return Err(e),
        };
        let poles = find_poles(&sample.response, cfg.biphoton.omega_l, cfg.quadrature.merge_tol)?;
        rows.push(PoleRow {
            lambda,
            branch: sample.state.branch,
            response_poles: sample.response.poles().to_vec(),
            product_poles: poles.rho(),
        });
    }
    Ok((rows, skipped))
}

/// The two response poles closest to zero frequency, ordered by `Im`.
pub fn lower_pair(row: &PoleRow) -> Option<(C64, C64)> {
    let mut p = row.response_poles.clone();
    if p.len() < 2 {
        return None;
    }
    p.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()));
    let (a, b) = (p[0], p[1]);
    Some(if a.im <= b.im { (a, b) } else { (b, a) })
}
