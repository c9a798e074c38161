//! Input/output response of the sample and the pole structure of the
//! two-photon spectral product `S*(ω_L − z) S(ω_L + z)`.

use crate::dicke::{self, ModelParams, SteadyState};
use crate::linalg::{self, Mat5, Vec5};
use crate::{Error, Result, C64, I};

/// Fluctuation index carrying the transmitted photon (`δψ†`), whose bare
/// resonance sits at `z = +ω_k`.
pub const CHANNEL: usize = 1;

/// Condition number above which a transfer-matrix solve is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Default distance below which poles of the two factors are merged.
pub const MERGE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct IOMatrices {
    pub m_in: Mat5,
    pub m_out: Mat5,
    pub params: ModelParams,
    pub state: SteadyState,
}

pub fn build_io_matrices(p: &ModelParams, ss: &SteadyState) -> Result<IOMatrices> {
    let m_in = dicke::build_stability_matrix(p, ss)?.m;
    let mut m_out = m_in;
    for k in 0..2 {
        m_out[(k, k)] += 2.0 * p.kappa;
    }
    Ok(IOMatrices { m_in, m_out, params: *p, state: *ss })
}

fn shifted(m: &Mat5, z: C64) -> Mat5 {
    let mut a = *m;
    for k in 0..5 {
        a[(k, k)] -= I * z;
    }
    a
}

fn inverse_checked(a: &Mat5) -> Result<Mat5> {
    let inv = a.try_inverse().ok_or(Error::NearSingular(f64::INFINITY))?;
    let cond = linalg::norm1(a) * linalg::norm1(&inv);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::NearSingular(cond));
    }
    Ok(inv)
}

/// `−(M_out − iz)(M_in − iz)⁻¹`.
pub fn transfer_matrix(io: &IOMatrices, z: C64) -> Result<Mat5> {
    let inv = inverse_checked(&shifted(&io.m_in, z))?;
    Ok(-(shifted(&io.m_out, z) * inv))
}

/// `−(M_in − iz)(M_out − iz)⁻¹`, the inverse of [`transfer_matrix`].
pub fn reverse_transfer_matrix(io: &IOMatrices, z: C64) -> Result<Mat5> {
    let inv = inverse_checked(&shifted(&io.m_out, z))?;
    Ok(-(shifted(&io.m_in, z) * inv))
}

/// Transmission `S(z)`: the photon-channel element of the transfer matrix.
/// Only one column of the inverse is needed, so this solves a single system.
pub fn response(io: &IOMatrices, z: C64) -> Result<C64> {
    let a = shifted(&io.m_in, z);
    let mut e = Vec5::zeros();
    e[CHANNEL] = C64::new(1.0, 0.0);
    let (x, cond) = linalg::solve(&a, &e).ok_or(Error::NearSingular(f64::INFINITY))?;
    if !(cond <= MAX_CONDITION) {
        return Err(Error::NearSingular(cond));
    }
    Ok(-1.0 - 2.0 * io.params.kappa * x[CHANNEL])
}

/// Partial-fraction form `S(z) = s_inf + Σ r_j/(z − p_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleExpansion {
    pub s_inf: C64,
    pub poles: Vec<C64>,
    pub residues: Vec<C64>,
}

impl PoleExpansion {
    pub fn eval(&self, z: C64) -> C64 {
        self.s_inf
            + self
                .poles
                .iter()
                .zip(&self.residues)
                .map(|(p, r)| r / (z - p))
                .sum::<C64>()
    }

    pub fn eval_derivative(&self, z: C64) -> C64 {
        -self
            .poles
            .iter()
            .zip(&self.residues)
            .map(|(p, r)| r / ((z - p) * (z - p)))
            .sum::<C64>()
    }
}

/// Eigen-decomposition of `M_in` gives the poles `p_j = −iμ_j` and residues
/// `r_j = −2iκ V_{cj} (V⁻¹)_{jc}`. Poles whose residue vanishes (the
/// spin-length mode) are dropped.
pub fn pole_expansion(io: &IOMatrices) -> Result<PoleExpansion> {
    let e = linalg::eigen(&io.m_in);
    let w = e.inverse.ok_or(Error::NearSingular(f64::INFINITY))?;
    let kappa = io.params.kappa;
    let mut pr: Vec<(C64, C64)> = (0..5)
        .map(|j| (-I * e.values[j], -2.0 * I * kappa * e.vectors[(CHANNEL, j)] * w[(j, CHANNEL)]))
        .filter(|(_, r)| r.norm() > 1e-13 * kappa)
        .collect();
    pr.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(PoleExpansion {
        s_inf: C64::new(-1.0, 0.0),
        poles: pr.iter().map(|x| x.0).collect(),
        residues: pr.iter().map(|x| x.1).collect(),
    })
}

/// Evaluable transmission of a sample or of the identity (no sample).
#[derive(Clone, Debug)]
pub struct ResponseFunction {
    pub io: Option<IOMatrices>,
    pub expansion: PoleExpansion,
    pub channel: (usize, usize),
}

impl ResponseFunction {
    pub fn new(io: IOMatrices) -> Result<Self> {
        let expansion = pole_expansion(&io)?;
        if let Some(p) = expansion.poles.iter().find(|p| !(p.im > 0.0)) {
            return Err(Error::UnstableBranch(-p.im));
        }
        Ok(ResponseFunction { io: Some(io), expansion, channel: (CHANNEL, CHANNEL) })
    }

    /// `S ≡ 1`.
    pub fn identity() -> Self {
        ResponseFunction {
            io: None,
            expansion: PoleExpansion { s_inf: C64::new(1.0, 0.0), poles: vec![], residues: vec![] },
            channel: (CHANNEL, CHANNEL),
        }
    }

    /// Response on a branch, built from scratch.
    pub fn for_state(p: &ModelParams, ss: &SteadyState) -> Result<Self> {
        Self::new(build_io_matrices(p, ss)?)
    }

    /// Exact evaluation by a linear solve.
    ///
    /// Modes that do not couple to the photon channel (the spin-length mode,
    /// bare spin lines at `λ = 0`) make `M_in − iz` singular at real `z`
    /// although `S` is regular there. At such points `S` is taken as the mean
    /// of two solves at `z ± iδ`, accurate to `O(δ²)` with `δ = 10⁻⁷(1 + |z|)`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let Some(io) = &self.io else { return Ok(self.expansion.s_inf) };
        match response(io, z) {
            Err(Error::NearSingular(_)) if z.im == 0.0 => {
                let d = 1e-7 * (1.0 + z.norm());
                Ok(0.5 * (response(io, z + I * d)? + response(io, z - I * d)?))
            }
            r => r,
        }
    }

    /// Evaluation through the partial fractions.
    pub fn eval_pf(&self, z: C64) -> C64 {
        self.expansion.eval(z)
    }

    pub fn poles(&self) -> &[C64] {
        &self.expansion.poles
    }
}

/// One pole of the spectral product, `c/(z−ρ) + d/(z−ρ)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductPole {
    pub rho: C64,
    /// 1 or 2.
    pub order: u8,
    pub c: C64,
    pub d: C64,
}

/// Side of a pole relative to the rotated line, seen along its direction
/// (`e^{−iπ/4}` for `q > 0`). Right-hand poles lie in the sector swept
/// when the real axis is turned onto the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    /// Exactly on the crossing line; counted with half weight.
    OnLine,
}

/// Poles of `h(z) = S*(ω_L − z̄) S(ω_L + z)` with `h = 1 + Σ` pole terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleSet {
    pub poles: Vec<ProductPole>,
    /// Constant part `|s_inf|²`.
    pub constant: C64,
    /// Side per pole relative to a contour crossing; empty until classified.
    pub side: Vec<Side>,
}

impl PoleSet {
    pub fn rho(&self) -> Vec<C64> {
        self.poles.iter().map(|p| p.rho).collect()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.constant + self.eval_remainder(z)
    }

    /// `h(z) − constant`.
    pub fn eval_remainder(&self, z: C64) -> C64 {
        self.poles
            .iter()
            .map(|p| {
                let u = 1.0 / (z - p.rho);
                p.c * u + p.d * u * u
            })
            .sum()
    }

    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> PoleSet {
        let idx: Vec<usize> = (0..self.len()).filter(|&k| keep(k)).collect();
        PoleSet {
            poles: idx.iter().map(|&k| self.poles[k]).collect(),
            constant: self.constant,
            side: idx.iter().filter_map(|&k| self.side.get(k).copied()).collect(),
        }
    }
}

/// Poles of the spectral product. The conjugated factor contributes
/// `ω_L − p̄_j` and the direct factor `p_j − ω_L`; coincidences closer than
/// `merge_tol` become second-order poles at the midpoint.
pub fn find_poles(resp: &ResponseFunction, omega_l: f64, merge_tol: f64) -> Result<PoleSet> {
    let e = &resp.expansion;
    let s_inf = e.s_inf;
    let f_poles: Vec<(C64, C64)> = e
        .poles
        .iter()
        .zip(&e.residues)
        .map(|(p, r)| (omega_l - p.conj(), -r.conj()))
        .collect();
    let g_poles: Vec<(C64, C64)> = e.poles.iter().zip(&e.residues).map(|(p, r)| (p - omega_l, *r)).collect();
    for (rho, _) in f_poles.iter().chain(&g_poles) {
        if !(rho.im > 0.0) {
            return Err(Error::UnstableBranch(-rho.im));
        }
    }
    let eval = |set: &[(C64, C64)], c0: C64, z: C64, skip: Option<usize>| -> C64 {
        c0 + set
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != skip)
            .map(|(_, (a, al))| al / (z - a))
            .sum::<C64>()
    };
    let mut g_used = vec![false; g_poles.len()];
    let mut poles = Vec::new();
    for (i, &(a, al)) in f_poles.iter().enumerate() {
        let partner = (0..g_poles.len())
            .filter(|&k| !g_used[k] && (g_poles[k].0 - a).norm() < merge_tol)
            .min_by(|&x, &y| (g_poles[x].0 - a).norm().total_cmp(&(g_poles[y].0 - a).norm()));
        match partner {
            Some(k) => {
                g_used[k] = true;
                let (bb, be) = g_poles[k];
                let rho = 0.5 * (a + bb);
                let ft = eval(&f_poles, s_inf.conj(), rho, Some(i));
                let gt = eval(&g_poles, s_inf, rho, Some(k));
                poles.push(ProductPole { rho, order: 2, c: al * gt + be * ft, d: al * be });
            }
            None => {
                let gv = eval(&g_poles, s_inf, a, None);
                poles.push(ProductPole { rho: a, order: 1, c: al * gv, d: C64::new(0.0, 0.0) });
            }
        }
    }
    for (k, &(bb, be)) in g_poles.iter().enumerate() {
        if !g_used[k] {
            let fv = eval(&f_poles, s_inf.conj(), bb, None);
            poles.push(ProductPole { rho: bb, order: 1, c: be * fv, d: C64::new(0.0, 0.0) });
        }
    }
    poles.sort_by(|a, b| a.rho.re.total_cmp(&b.rho.re).then(a.rho.im.total_cmp(&b.rho.im)));
    Ok(PoleSet { poles, constant: s_inf.conj() * s_inf, side: vec![] })
}

/// `2πi Σ Res[h(z) e^{−ibqz² + 2izt}]` over the given poles.
pub fn residue_sum(poles: &PoleSet, q: f64, t: f64, b: f64) -> C64 {
    poles
        .poles
        .iter()
        .map(|p| {
            let e = (-I * b * q * p.rho * p.rho + 2.0 * I * t * p.rho).exp();
            let de = (-2.0 * I * b * q * p.rho + 2.0 * I * t) * e;
            p.c * e + p.d * de
        })
        .sum::<C64>()
        * (2.0 * std::f64::consts::PI * I)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::normal_steady_state;

    fn resp(kappa: f64, lambda: f64) -> ResponseFunction {
        let p = ModelParams::resonant(1.5, kappa, lambda).unwrap();
        let (ss, _) = dicke::select_branch(&p).unwrap();
        ResponseFunction::for_state(&p, &ss).unwrap()
    }

    #[test]
    fn io_difference_only_on_photon_diagonal() {
        let p = ModelParams::resonant(1.5, 0.05, 0.3).unwrap();
        let io = build_io_matrices(&p, &normal_steady_state(&p, false)).unwrap();
        let d = io.m_out - io.m_in;
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j && i < 2 { 0.1 } else { 0.0 };
                assert!((d[(i, j)] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_fractions_match_solve() {
        for l in [0.0, 0.01, 0.3, 1.0, 1.2] {
            let r = resp(0.05, l);
            for z in [-3.0, -0.7, 0.2, 1.4, 1.5, 2.3] {
                let z = C64::new(z, 0.0);
                assert!((r.eval(z).unwrap() - r.eval_pf(z)).norm() < 1e-10, "lambda {l} z {z}");
            }
        }
    }

    #[test]
    fn empty_cavity_single_pole() {
        let r = resp(0.05, 0.0);
        assert_eq!(r.poles().len(), 1);
        assert!((r.poles()[0] - C64::new(1.5, 0.05)).norm() < 1e-12);
    }

    #[test]
    fn product_matches_direct() {
        let r = resp(0.05, 0.3);
        let ps = find_poles(&r, 1.5, MERGE_TOL).unwrap();
        for z in [-2.0, -0.1, 0.0, 0.4, 3.0] {
            let direct = r.eval(C64::new(1.5 - z, 0.0)).unwrap().conj() * r.eval(C64::new(1.5 + z, 0.0)).unwrap();
            assert!((ps.eval(C64::new(z, 0.0)) - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn merged_double_pole_matches_direct() {
        // empty cavity on resonance: both factors have their pole at iκ
        let r = resp(0.05, 0.0);
        let ps = find_poles(&r, 1.5, MERGE_TOL).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps.poles[0].order, 2);
        for z in [-1.0, 0.03, 0.5] {
            let direct = r.eval(C64::new(1.5 - z, 0.0)).unwrap().conj() * r.eval(C64::new(1.5 + z, 0.0)).unwrap();
            assert!((ps.eval(C64::new(z, 0.0)) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn second_order_residue() {
        let ps = PoleSet {
            poles: vec![ProductPole { rho: I, order: 2, c: C64::new(0.0, 0.0), d: C64::new(1.0, 0.0) }],
            constant: C64::new(0.0, 0.0),
            side: vec![],
        };
        let v = residue_sum(&ps, 0.0, 1.0, 1.0);
        let want = -4.0 * std::f64::consts::PI * (-2.0f64).exp();
        assert!((v - want).norm() < 1e-14);
        assert_eq!(residue_sum(&ps.subset(|_| false), 0.3, 1.0, 1.0), C64::new(0.0, 0.0));
    }
}
