//! Frequency-entangled photon pair and the coincidence rate behind a 50:50
//! beam splitter when one photon passes the sample and the other a delay.

use crate::contour::{bare_interference, biphoton_norm, ContourEvaluator, QuadratureConfig};
use crate::dicke::{Branch, ModelParams};
use crate::oracle::{self, adaptive};
use crate::response::{find_poles, PoleSet, ResponseFunction};
use crate::special::sinc;
use crate::{Error, Result, C64, I};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiphotonSpec {
    /// Centre frequency; the photons sit at `ω_L ± z`.
    pub omega_l: f64,
    /// Bandwidth parameter of `F(z) = sinc(bz²)`.
    pub b: f64,
}

impl BiphotonSpec {
    pub fn new(omega_l: f64, b: f64) -> Result<Self> {
        if !(omega_l.is_finite() && b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParams("omega_l finite and b > 0 required".into()));
        }
        Ok(BiphotonSpec { omega_l, b })
    }
}

pub fn biphoton_amplitude(spec: &BiphotonSpec, z: f64) -> f64 {
    sinc(spec.b * z * z)
}

/// Dispersionless delay line, `e^{iωt}`.
pub fn delay_phase(t_delay: f64, omega: f64) -> C64 {
    (I * omega * t_delay).exp()
}

/// Sign of the delay exponent in the interference integral.
///
/// `Plus` integrates `e^{+2izt}`, which puts the slow sample-induced decay
/// at positive delay; `Minus` mirrors the trace in `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentSign {
    Plus,
    Minus,
}

impl ExponentSign {
    pub fn value(self) -> f64 {
        match self {
            ExponentSign::Plus => 1.0,
            ExponentSign::Minus => -1.0,
        }
    }
}

/// `|F(ω)|² S*(ω_L − ω) S(ω_L + ω)`.
pub fn spectral_product(resp: &ResponseFunction, spec: &BiphotonSpec, omega: f64) -> Result<C64> {
    let f = biphoton_amplitude(spec, omega);
    Ok(f * f * oracle::spectral_product_direct(resp, spec.omega_l, omega)?)
}

/// `¼∫|F|²(|S(ω_L − z)|² + |S(ω_L + z)|²) dz`.
///
/// Written as `½|s_∞|²∫|F|²` plus an adaptive integral of the deviation
/// from `|s_∞|²`, which decays with `z`.
pub fn background_terms(resp: &ResponseFunction, spec: &BiphotonSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let s2 = resp.expansion.s_inf.norm_sqr();
    let base = 0.5 * s2 * biphoton_norm(spec.b);
    if resp.io.is_none() {
        return Ok(base);
    }
    let tol = (0.1 * cfg.oracle_tolerance).min(1e-9);
    let z_max = oracle::window(spec.b, tol);
    let b = spec.b;
    let mut failure = None;
    let f = |z: f64| -> C64 {
        let fz = sinc(b * z * z);
        let m = resp.eval(C64::new(spec.omega_l - z, 0.0)).and_then(|a| {
            resp.eval(C64::new(spec.omega_l + z, 0.0)).map(|c| a.norm_sqr() + c.norm_sqr() - 2.0 * s2)
        });
        match m {
            Ok(v) => C64::new(0.25 * fz * fz * v, 0.0),
            Err(e) => {
                failure.get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        }
    };
    let n0 = ((2.0 * z_max * (2.0 * b * z_max + 1.0) / std::f64::consts::PI) as usize).max(64);
    let (dev, _) = adaptive(f, -z_max, z_max, n0, tol, 10_000_000)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(base + dev.re)
}

/// Everything needed to evaluate `P_c(t)` for one sample and one pair spectrum.
#[derive(Clone, Debug)]
pub struct CoincidenceModel {
    pub response: ResponseFunction,
    pub spec: BiphotonSpec,
    pub cfg: QuadratureConfig,
    pub sign: ExponentSign,
    pub poles: PoleSet,
    pub background: f64,
    evaluator: ContourEvaluator,
}

impl CoincidenceModel {
    pub fn new(response: ResponseFunction, spec: BiphotonSpec, cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let poles = find_poles(&response, spec.omega_l, cfg.merge_tol)?;
        let background = background_terms(&response, &spec, &cfg)?;
        let evaluator = ContourEvaluator::new(poles.clone(), spec.b, cfg)?;
        Ok(CoincidenceModel { response, spec, cfg, sign: ExponentSign::Plus, poles, background, evaluator })
    }

    pub fn identity(spec: BiphotonSpec, cfg: QuadratureConfig) -> Result<Self> {
        Self::new(ResponseFunction::identity(), spec, cfg)
    }

    pub fn with_sign(mut self, sign: ExponentSign) -> Self {
        self.sign = sign;
        self
    }

    /// `I(t) = ∫|F|² h(z) e^{±2izt} dz` by the contour method.
    pub fn interference(&self, t: f64) -> Result<C64> {
        self.evaluator.interference(self.sign.value() * t)
    }

    /// Same integral by direct real-axis quadrature.
    pub fn interference_oracle(&self, t: f64) -> Result<C64> {
        oracle::oracle_integral(t, &self.response, &self.spec, &self.cfg, self.sign)
    }

    pub fn probability(&self, t: f64) -> Result<f64> {
        Ok(self.background - 0.5 * self.interference(t)?.re)
    }

    /// `P_c` on a delay grid; evaluated in parallel, returned in grid order.
    pub fn trace(&self, t_grid: &[f64], meta: TraceMeta) -> Result<CoincidenceTrace> {
        let vals: Vec<Result<f64>> = t_grid.par_iter().map(|&t| self.probability(t)).collect();
        let p_c = vals.into_iter().collect::<Result<Vec<f64>>>()?;
        let s2 = self.response.expansion.s_inf.norm_sqr();
        let dip = t_grid.iter().map(|&t| -0.5 * s2 * bare_interference(t, self.spec.b)).collect();
        Ok(CoincidenceTrace { t_delay: t_grid.to_vec(), p_c, background: self.background, dip, meta })
    }
}

/// Coincidence probability at one delay, building the model on the fly.
pub fn coincidence_probability(resp: &ResponseFunction, spec: &BiphotonSpec, t_delay: f64, cfg: &QuadratureConfig) -> Result<f64> {
    CoincidenceModel::new(resp.clone(), *spec, *cfg)?.probability(t_delay)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub params: Option<ModelParams>,
    pub branch: Option<Branch>,
    pub spec: BiphotonSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoincidenceTrace {
    pub t_delay: Vec<f64>,
    pub p_c: Vec<f64>,
    pub background: f64,
    /// Sample-independent part of `p_c − background`: the two-photon dip
    /// scaled by `|s_∞|²`.
    pub dip: Vec<f64>,
    pub meta: TraceMeta,
}

impl CoincidenceTrace {
    /// `P_c / background`.
    pub fn normalized(&self) -> Vec<f64> {
        self.p_c.iter().map(|p| p / self.background).collect()
    }
}
