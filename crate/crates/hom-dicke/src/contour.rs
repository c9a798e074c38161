//! Rotated-contour evaluation of the interference integral
//! `I(t) = ∫ |F(z)|² h(z) e^{2izt} dz` with `F(z) = sinc(bz²)` and
//! `h(z) = S*(ω_L − z) S(ω_L + z)`.
//!
//! Writing `F(z) = ½∫_{−1}^{1} e^{ikbz²} dk` turns the integral into
//! `I(t) = ¼∫_{−2}^{2} (2 − |q|) G(q, t) dq` with
//! `G(q, t) = ∫ h(z) e^{−ibqz² + 2izt} dz`. For `q ≠ 0` the exponent is a
//! Gaussian centred at the crossing point `z₀ = t/(bq)`; along the line
//! `z = z₀ + e^{∓iπ/4} u` (upper sign for `q > 0`) it becomes
//! `e^{it²/(bq)} e^{−b|q|u²}`. Poles of `h` between the real axis and that
//! line are added by residues.

use crate::response::{residue_sum, PoleSet, ProductPole, Side};
use crate::special::{faddeeva, faddeeva_derivative, k_integral};
use crate::{Error, Result, C64, I};
use gauss_quad::{FiniteAboveNegOneF64, GaussHermite, GaussLaguerre, GaussLegendre};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Hermite nodes on the rotated line.
    pub gauss_nodes: usize,
    /// Relative tolerance of the real-axis oracle.
    pub oracle_tolerance: f64,
    /// Minimum number of outer-integral nodes per sign of `q`.
    pub q_grid: usize,
    /// Below this `|q|` the rotated line integral uses the closed pole form
    /// instead of Gauss–Hermite nodes.
    pub q_epsilon: f64,
    /// Distance below which product poles are merged into a double pole.
    pub merge_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            gauss_nodes: 200,
            oracle_tolerance: 1e-8,
            q_grid: 801,
            q_epsilon: 1e-3,
            merge_tol: crate::response::MERGE_TOL,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_nodes < 16 || self.q_grid < 16 {
            return Err(Error::Config("node counts must be at least 16".into()));
        }
        let tol_ok = |x: f64| x > 0.0 && x < 1e-2;
        if !tol_ok(self.oracle_tolerance) || !tol_ok(self.q_epsilon) || !tol_ok(self.merge_tol) {
            return Err(Error::Config("tolerances must lie in (0, 1e-2)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// `q > 0`: line direction `e^{−iπ/4}`.
    CcwPlusPiOver4,
    /// `q < 0`: line direction `e^{+iπ/4}`.
    CwMinusPiOver4,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourPlan {
    pub q: f64,
    pub t: f64,
    pub rotation: Rotation,
    /// `t/(bq)`, infinite for `q = 0`.
    pub crossing: f64,
    pub included_poles: PoleSet,
    /// Some pole sits exactly on the rotated line.
    pub on_line: bool,
}

fn cached<F: FnOnce() -> Vec<(f64, f64)>>(kind: u8, n: usize, make: F) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(kind, n)) {
        return v.clone();
    }
    let v = Arc::new(make());
    cache.lock().unwrap().entry((kind, n)).or_insert(v).clone()
}

pub(crate) fn hermite_rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    cached(0, n, || {
        GaussHermite::new(NonZeroUsize::new(n).unwrap()).as_node_weight_pairs().to_vec()
    })
}

pub(crate) fn legendre_rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    cached(1, n, || {
        GaussLegendre::new(NonZeroUsize::new(n).unwrap()).as_node_weight_pairs().to_vec()
    })
}

fn laguerre_rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    cached(2, n, || {
        GaussLaguerre::new(NonZeroUsize::new(n).unwrap(), FiniteAboveNegOneF64::default())
            .as_node_weight_pairs()
            .to_vec()
    })
}

/// `∫_a^b f` by `n_panels` equal Gauss–Legendre panels of order 16.
pub(crate) fn gl_panels<F: FnMut(f64) -> C64>(a: f64, b: f64, n_panels: usize, mut f: F) -> C64 {
    let rule = legendre_rule(16);
    let h = (b - a) / n_panels as f64;
    let mut s = C64::new(0.0, 0.0);
    for k in 0..n_panels {
        let lo = a + h * k as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule.iter() {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    s * (0.5 * h)
}

fn sigma(q: f64) -> f64 {
    if q > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Scaled distance of a pole from the rotated line, `ζ = √(b|q|) e^{±iπ/4}(ρ − z₀)`.
/// `Im ζ < 0` means the pole lies between the real axis and the line.
/// `a = |q|` may be complex for analytic continuation.
fn zeta(rho: C64, a: C64, sig: f64, t: f64, b: f64) -> C64 {
    let z0 = sig * t / (b * a);
    (b * a).sqrt() * C64::from_polar(1.0, sig * FRAC_PI_4) * (rho - z0)
}

/// Which closed form represents a pole's line integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PoleBranch {
    Above,
    Enclosed,
    OnLine,
}

fn branch_of(z: C64) -> PoleBranch {
    if z.im > 0.0 {
        PoleBranch::Above
    } else if z.im < 0.0 {
        PoleBranch::Enclosed
    } else {
        PoleBranch::OnLine
    }
}

/// Line integral of `c/(z−ρ) + d/(z−ρ)²` against the Gaussian phase, with the
/// overall `e^{it²/(bq)}` removed.
fn pole_line_amplitude(p: &ProductPole, a: C64, sig: f64, t: f64, b: f64, br: PoleBranch) -> C64 {
    let z = zeta(p.rho, a, sig, t, b);
    let dz = (b * a).sqrt() * C64::from_polar(1.0, sig * FRAC_PI_4);
    let (wv, wd) = match br {
        PoleBranch::Above => {
            let w = faddeeva(z);
            (w, faddeeva_derivative(z, w))
        }
        PoleBranch::Enclosed => {
            let w = faddeeva(-z);
            (-w, faddeeva_derivative(-z, w))
        }
        PoleBranch::OnLine => {
            let w1 = faddeeva(z);
            let w2 = faddeeva(-z);
            (0.5 * (w1 - w2), 0.5 * (faddeeva_derivative(z, w1) + faddeeva_derivative(-z, w2)))
        }
    };
    I * PI * (p.c * wv + p.d * wd * dz)
}

/// `e^{it²/(bq)} e^{∓iπ/4} ∫ f(z(u)) e^{−b|q|u²} du` along the rotated line,
/// with Gauss–Hermite nodes scaled to the weight.
pub fn rotated_gaussian_integral<F: Fn(C64) -> C64>(q: f64, t: f64, b: f64, nodes: usize, f: F) -> Result<C64> {
    if q == 0.0 {
        return Err(Error::QuadratureFailure("rotated form needs q != 0".into()));
    }
    let sig = sigma(q);
    let s = (b * q.abs()).sqrt();
    let dir = C64::from_polar(1.0, -sig * FRAC_PI_4);
    let z0 = t / (b * q);
    let rule = hermite_rule(nodes);
    let sum: C64 = rule.iter().map(|&(x, w)| w * f(z0 + dir * (x / s))).sum();
    Ok((I * t * t / (b * q)).exp() * dir * sum / s)
}

/// Classify poles against the crossing point of the rotated line.
pub fn classify_poles(poles: &PoleSet, q: f64, t: f64, b: f64) -> PoleSet {
    let mut out = poles.clone();
    out.side = poles
        .poles
        .iter()
        .map(|p| {
            if q == 0.0 {
                return Side::Right;
            }
            let z = zeta(p.rho, C64::new(q.abs(), 0.0), sigma(q), t, b);
            match branch_of(z) {
                PoleBranch::Enclosed => Side::Right,
                PoleBranch::Above => Side::Left,
                PoleBranch::OnLine => Side::OnLine,
            }
        })
        .collect();
    // for q < 0 the enclosed poles are the left-hand ones
    if q < 0.0 {
        for s in out.side.iter_mut() {
            *s = match *s {
                Side::Right => Side::Left,
                Side::Left => Side::Right,
                o => o,
            };
        }
    }
    out
}

pub fn plan(poles: &PoleSet, q: f64, t: f64, b: f64) -> ContourPlan {
    let classified = classify_poles(poles, q, t, b);
    let keep = if q > 0.0 { Side::Right } else { Side::Left };
    let on_line = classified.side.contains(&Side::OnLine);
    let included = classified.subset(|k| q == 0.0 || classified.side[k] == keep || classified.side[k] == Side::OnLine);
    ContourPlan {
        q,
        t,
        rotation: if q > 0.0 {
            Rotation::CcwPlusPiOver4
        } else if q < 0.0 {
            Rotation::CwMinusPiOver4
        } else {
            Rotation::None
        },
        crossing: if q == 0.0 { f64::INFINITY } else { t / (b * q) },
        included_poles: included,
        on_line,
    }
}

/// Residue contribution of the poles a plan includes; poles on the line count half.
fn plan_residues(pl: &ContourPlan, b: f64) -> C64 {
    let ps = &pl.included_poles;
    let full = ps.subset(|k| ps.side[k] != Side::OnLine);
    let half = ps.subset(|k| ps.side[k] == Side::OnLine);
    residue_sum(&full, pl.q, pl.t, b) + 0.5 * residue_sum(&half, pl.q, pl.t, b)
}

/// Near-line poles (|Im ζ| below this) are integrated in closed form.
const NEAR_LINE: f64 = 1.5;

/// Line integral of `h − constant`, `e^{it²/(bq)}` included.
fn remainder_line_integral(poles: &PoleSet, q: f64, t: f64, b: f64, cfg: &QuadratureConfig) -> Result<C64> {
    let sig = sigma(q);
    let a = C64::new(q.abs(), 0.0);
    let phase = (I * t * t / (b * q)).exp();
    if q.abs() < cfg.q_epsilon {
        let amp: C64 = poles
            .poles
            .iter()
            .map(|p| pole_line_amplitude(p, a, sig, t, b, branch_of(zeta(p.rho, a, sig, t, b))))
            .sum();
        return Ok(phase * amp);
    }
    let mut near = Vec::new();
    let mut far = Vec::new();
    for p in &poles.poles {
        let z = zeta(p.rho, a, sig, t, b);
        if z.im.abs() < NEAR_LINE {
            near.push((*p, branch_of(z)));
        } else {
            far.push(*p);
        }
    }
    let exact: C64 = near.iter().map(|(p, br)| pole_line_amplitude(p, a, sig, t, b, *br)).sum();
    let gh = if far.is_empty() {
        C64::new(0.0, 0.0)
    } else {
        let far_set = PoleSet { poles: far, constant: C64::new(0.0, 0.0), side: vec![] };
        rotated_gaussian_integral(q, t, b, cfg.gauss_nodes, |z| far_set.eval_remainder(z))?
    };
    Ok(gh + phase * exact)
}

/// `G(q, t) = ∫ h(z) e^{−ibqz² + 2izt} dz`.
pub fn g_of_q_t(q: f64, t: f64, poles: &PoleSet, b: f64, cfg: &QuadratureConfig) -> Result<C64> {
    check_stable(poles)?;
    if q.abs() > 2.0 {
        return Err(Error::QuadratureFailure("|q| > 2".into()));
    }
    if q == 0.0 {
        return if t > 0.0 {
            Ok(residue_sum(poles, 0.0, t, b))
        } else if t < 0.0 {
            Ok(C64::new(0.0, 0.0))
        } else {
            Err(Error::QuadratureFailure("G(0, 0) diverges".into()))
        };
    }
    let pl = plan(poles, q, t, b);
    let g1 = rotated_gaussian_integral(q, t, b, cfg.gauss_nodes, |_| C64::new(1.0, 0.0))?;
    Ok(poles.constant * g1 + remainder_line_integral(poles, q, t, b, cfg)? + plan_residues(&pl, b))
}

/// `G(q, t)` without the constant part of `h`.
fn g_remainder(q: f64, t: f64, poles: &PoleSet, b: f64, cfg: &QuadratureConfig) -> Result<C64> {
    let pl = plan(poles, q, t, b);
    Ok(remainder_line_integral(poles, q, t, b, cfg)? + plan_residues(&pl, b))
}

fn check_stable(poles: &PoleSet) -> Result<()> {
    match poles.poles.iter().find(|p| !(p.rho.im > 0.0)) {
        Some(p) => Err(Error::UnstableBranch(-p.rho.im)),
        None => Ok(()),
    }
}

/// `∫|F|² e^{2izt} dz` for `F(z) = sinc(bz²)`; even in `t`.
pub fn bare_interference(t: f64, b: f64) -> f64 {
    if t == 0.0 {
        return biphoton_norm(b);
    }
    let t_big = t * t / b;
    let k = k_integral(t_big);
    0.5 * (C64::from_polar(1.0, -FRAC_PI_4) * (PI / b).sqrt() * k).re
}

/// `∫|F|² dz = (4/3)√(π/b)`.
pub fn biphoton_norm(b: f64) -> f64 {
    4.0 / 3.0 * (PI / b).sqrt()
}

/// Contour evaluation of `I(t)` for a fixed pole set.
#[derive(Clone, Debug)]
pub struct ContourEvaluator {
    pub poles: PoleSet,
    pub b: f64,
    pub cfg: QuadratureConfig,
}

impl ContourEvaluator {
    pub fn new(poles: PoleSet, b: f64, cfg: QuadratureConfig) -> Result<Self> {
        check_stable(&poles)?;
        cfg.validate()?;
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParams("b must be positive".into()));
        }
        Ok(ContourEvaluator { poles, b, cfg })
    }

    /// `I(t) = ∫|F|² h e^{2izt} dz`.
    pub fn interference(&self, t: f64) -> Result<C64> {
        let bare = if self.poles.constant == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            self.poles.constant * bare_interference(t, self.b)
        };
        if self.poles.is_empty() {
            return Ok(bare);
        }
        let r = self.half(t, 1.0)? + self.half(t, -1.0)?;
        Ok(bare + 0.25 * r)
    }

    /// `∫_0^2 (2 − q) G_R(σq, t) dq`.
    fn half(&self, t: f64, sig: f64) -> Result<C64> {
        let b = self.b;
        let n_min = self.cfg.q_grid.div_ceil(16).max(1);
        if t == 0.0 {
            // q = s², smooth in s
            let mut err = None;
            let v = gl_panels(0.0, 2f64.sqrt(), n_min, |s| {
                let q = s * s;
                match g_remainder(sig * q, 0.0, &self.poles, b, &self.cfg) {
                    Ok(g) => (2.0 - q) * g * (2.0 * s),
                    Err(e) => {
                        err = Some(e);
                        C64::new(0.0, 0.0)
                    }
                }
            });
            return err.map_or(Ok(v), Err);
        }
        let t_big = t * t / b;
        let mut breaks: Vec<f64> = self
            .poles
            .poles
            .iter()
            .map(|p| {
                let key = if sig > 0.0 { p.rho.re + p.rho.im } else { p.rho.im - p.rho.re };
                b * key / t
            })
            .filter(|&v| v > 0.5 && v.is_finite())
            .collect();
        breaks.sort_by(f64::total_cmp);
        let vmax = breaks.last().copied().unwrap_or(0.0);
        let v_end = (3.0 * vmax).max(0.5).max(20.0 / t_big);
        let mut edges = vec![0.5];
        edges.extend(breaks.iter().copied());
        edges.push(v_end);
        edges.dedup();

        let rule = legendre_rule(16);
        let h_cap = (v_end - 0.5) / n_min as f64;
        let mut total = C64::new(0.0, 0.0);
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut x = lo;
            while x < hi {
                let h = (2.0 * PI / t_big).min(0.25 * x).min(h_cap);
                let x1 = if x + 1.5 * h >= hi { hi } else { x + h };
                let (mid, half) = (0.5 * (x + x1), 0.5 * (x1 - x));
                for &(u, wt) in rule.iter() {
                    let v = mid + half * u;
                    let q = 1.0 / v;
                    let g = g_remainder(sig * q, t, &self.poles, b, &self.cfg)?;
                    total += wt * half * (2.0 - q) * g / (v * v);
                }
                x = x1;
            }
        }
        Ok(total + self.tail(t, sig, v_end))
    }

    /// `∫_{v_end}^∞` of the outer integrand, where every pole keeps its side.
    fn tail(&self, t: f64, sig: f64, v_end: f64) -> C64 {
        let b = self.b;
        let t_big = t * t / b;
        let q_end = 1.0 / v_end;
        let a_end = C64::new(q_end, 0.0);
        let branches: Vec<PoleBranch> =
            self.poles.poles.iter().map(|p| branch_of(zeta(p.rho, a_end, sig, t, b))).collect();

        // residue part: smooth in q on (0, q_end]
        let enclosed = PoleSet {
            poles: (0..self.poles.len())
                .filter(|&k| branches[k] == PoleBranch::Enclosed)
                .map(|k| self.poles.poles[k])
                .collect(),
            constant: C64::new(0.0, 0.0),
            side: vec![],
        };
        let mut total = C64::new(0.0, 0.0);
        if !enclosed.is_empty() {
            let r2 = enclosed.poles.iter().map(|p| p.rho.norm_sqr()).fold(0.0, f64::max);
            let n = ((b * r2 * q_end) as usize + 2).max(4);
            total += gl_panels(0.0, q_end, n, |q| (2.0 - q) * residue_sum(&enclosed, sig * q, t, b));
        }

        // line part: v = v_end + iσs turns e^{iσTv} into e^{−Ts}
        let rule = laguerre_rule(48);
        let phase0 = (I * sig * t_big * v_end).exp();
        let mut s = C64::new(0.0, 0.0);
        for &(x, w) in rule.iter() {
            let v = C64::new(v_end, sig * x / t_big);
            let a = 1.0 / v;
            let amp: C64 = self
                .poles
                .poles
                .iter()
                .zip(&branches)
                .map(|(p, &br)| pole_line_amplitude(p, a, sig, t, b, br))
                .sum();
            s += w * (2.0 - a) * amp / (v * v);
        }
        total + I * sig / t_big * phase0 * s
    }
}

/// `I(t)` from a pole set in one call.
pub fn double_k_integral(t: f64, poles: &PoleSet, b: f64, cfg: &QuadratureConfig) -> Result<C64> {
    ContourEvaluator::new(poles.clone(), b, *cfg)?.interference(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_of_one() {
        for q in [0.5, -0.3, 1.7] {
            let t = 0.8;
            let b = 1.3;
            let v = rotated_gaussian_integral(q, t, b, 200, |_| C64::new(1.0, 0.0)).unwrap();
            let want = (I * t * t / (b * q)).exp() * (PI / (b * q.abs())).sqrt()
                * C64::from_polar(1.0, -sigma(q) * FRAC_PI_4);
            assert!((v - want).norm() < 1e-13, "{v} {want}");
        }
    }

    #[test]
    fn triangular_weight_of_one() {
        let v = gl_panels(0.0, 2.0, 4, |q| C64::new(2.0 * (2.0 - q), 0.0));
        assert!((0.25 * v.re - 1.0).abs() < 1e-14);
        let v = gl_panels(0.0, 2.0, 4, |q| C64::new(2.0 * (2.0 - q) * q * q, 0.0));
        assert!((v.re - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn bare_at_zero_is_norm() {
        assert_eq!(bare_interference(0.0, 1.0), biphoton_norm(1.0));
    }

    #[test]
    fn single_pole_line_integral_matches_hermite() {
        // pole far from the line so plain Gauss–Hermite is accurate
        let p = ProductPole { rho: C64::new(0.3, 6.0), order: 1, c: C64::new(0.7, -0.2), d: C64::new(0.0, 0.0) };
        let ps = PoleSet { poles: vec![p], constant: C64::new(0.0, 0.0), side: vec![] };
        for (q, t) in [(0.5, 1.0), (-0.5, 1.0), (1.2, -2.0)] {
            let gh = rotated_gaussian_integral(q, t, 1.0, 200, |z| ps.eval_remainder(z)).unwrap();
            let a = C64::new(f64::abs(q), 0.0);
            let br = branch_of(zeta(p.rho, a, sigma(q), t, 1.0));
            let ex = (I * t * t / q).exp() * pole_line_amplitude(&p, a, sigma(q), t, 1.0, br);
            assert!((gh - ex).norm() < 1e-12, "{gh} {ex}");
        }
    }
}
