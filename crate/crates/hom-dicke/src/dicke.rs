//! Dicke sample: parameters, steady states, linear stability and polariton
//! spectra. All variables are intensive (divided by the emitter number), so
//! the spin length is `j_z² + j₊j₋ = 1/4`.

use crate::linalg::{self, Mat5};
use crate::{Error, Result, C64, I};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_o: f64,
    pub omega_k: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// Emitter count. Only recorded, the dynamics are rescaled.
    pub n_emitters: u64,
}

impl ModelParams {
    pub fn new(omega_o: f64, omega_k: f64, kappa: f64, lambda: f64) -> Result<Self> {
        let p = ModelParams { omega_o, omega_k, kappa, lambda, n_emitters: 1 };
        p.validate()?;
        Ok(p)
    }

    /// Resonant sample `ω_o = ω_k = omega`.
    pub fn resonant(omega: f64, kappa: f64, lambda: f64) -> Result<Self> {
        Self::new(omega, omega, kappa, lambda)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        ModelParams { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite();
        if !(ok(self.omega_o) && self.omega_o > 0.0 && ok(self.omega_k) && self.omega_k > 0.0) {
            return Err(Error::InvalidParams("frequencies must be positive".into()));
        }
        if !(ok(self.kappa) && self.kappa >= 0.0 && ok(self.lambda) && self.lambda >= 0.0) {
            return Err(Error::InvalidParams("kappa and lambda must be non-negative".into()));
        }
        if self.n_emitters == 0 {
            return Err(Error::InvalidParams("n_emitters must be positive".into()));
        }
        Ok(())
    }
}

/// `λ_c = sqrt((ω_k ω_o / 4)(1 + κ²/ω_k²))`.
pub fn critical_coupling(p: &ModelParams) -> f64 {
    (p.omega_k * p.omega_o / 4.0 * (1.0 + (p.kappa / p.omega_k).powi(2))).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    NormalGround,
    NormalExcited,
    SuperRadiant,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::NormalGround => "normal_ground",
            Branch::NormalExcited => "normal_excited",
            Branch::SuperRadiant => "super_radiant",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    pub psi: C64,
    pub psi_dag: C64,
    pub j_plus: C64,
    pub j_minus: C64,
    pub j_z: f64,
    pub branch: Branch,
}

impl SteadyState {
    pub fn spin_length(&self) -> C64 {
        self.j_z * self.j_z + self.j_plus * self.j_minus
    }

    /// Components in fluctuation-basis order `(ψ, ψ†, J₊, J₋, J_z)`.
    pub fn components(&self) -> [C64; 5] {
        [self.psi, self.psi_dag, self.j_plus, self.j_minus, C64::new(self.j_z, 0.0)]
    }
}

pub fn normal_steady_state(_p: &ModelParams, excited: bool) -> SteadyState {
    let zero = C64::new(0.0, 0.0);
    SteadyState {
        psi: zero,
        psi_dag: zero,
        j_plus: zero,
        j_minus: zero,
        j_z: if excited { 0.5 } else { -0.5 },
        branch: if excited { Branch::NormalExcited } else { Branch::NormalGround },
    }
}

/// Super-radiant fixed point with real positive `J₊ = J₋`.
///
/// The cavity amplitude then follows from stationarity of the field
/// equation, `ψ = −2λJ/(ω_k − iκ)`; it is real only for `κ = 0`.
pub fn superradiant_steady_state(p: &ModelParams) -> Result<SteadyState> {
    let lc = critical_coupling(p);
    if p.lambda <= lc {
        return Err(Error::BelowCritical { lambda: p.lambda, critical: lc });
    }
    let r2 = (lc / p.lambda).powi(2);
    let j_z = -0.5 * r2;
    // 1 − r⁴ written to keep precision as λ → λ_c
    let j = 0.5 * ((1.0 - r2) * (1.0 + r2)).sqrt();
    let psi = -2.0 * p.lambda * j / C64::new(p.omega_k, -p.kappa);
    Ok(SteadyState {
        psi,
        psi_dag: psi.conj(),
        j_plus: C64::new(j, 0.0),
        j_minus: C64::new(j, 0.0),
        j_z,
        branch: Branch::SuperRadiant,
    })
}

/// Right-hand sides of the mean-field equations of motion.
pub fn equations_of_motion(p: &ModelParams, s: &[C64; 5]) -> [C64; 5] {
    let [psi, psid, jp, jm, jz] = *s;
    let x = psi + psid;
    let l = p.lambda;
    [
        C64::new(-p.kappa, -p.omega_k) * psi - I * l * (jp + jm),
        C64::new(-p.kappa, p.omega_k) * psid + I * l * (jp + jm),
        I * p.omega_o * jp - 2.0 * I * l * jz * x,
        -I * p.omega_o * jm + 2.0 * I * l * jz * x,
        I * l * (jm - jp) * x,
    ]
}

pub fn steady_state_residual(p: &ModelParams, ss: &SteadyState) -> f64 {
    equations_of_motion(p, &ss.components())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub const BASIS_LABELS: [&str; 5] = ["dpsi", "dpsi_dag", "dJ+", "dJ-", "dJz"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityMatrix {
    pub m: Mat5,
}

impl StabilityMatrix {
    pub fn basis_labels(&self) -> [&'static str; 5] {
        BASIS_LABELS
    }
}

/// Residual above which a state is rejected by [`build_stability_matrix`].
pub const STATIONARY_TOL: f64 = 1e-8;

/// Jacobian of [`equations_of_motion`] at the steady state.
pub fn build_stability_matrix(p: &ModelParams, ss: &SteadyState) -> Result<StabilityMatrix> {
    let res = steady_state_residual(p, ss);
    if !(res <= STATIONARY_TOL) {
        return Err(Error::NonStationaryInput(res));
    }
    Ok(StabilityMatrix { m: jacobian(p, ss) })
}

pub(crate) fn jacobian(p: &ModelParams, ss: &SteadyState) -> Mat5 {
    let l = p.lambda;
    let x = ss.psi + ss.psi_dag;
    let jz = C64::new(ss.j_z, 0.0);
    let il = I * l;
    let z = C64::new(0.0, 0.0);
    let d = il * (ss.j_minus - ss.j_plus);
    #[rustfmt::skip]
    let rows = [
        C64::new(-p.kappa, -p.omega_k), z, -il, -il, z,
        z, C64::new(-p.kappa, p.omega_k), il, il, z,
        -2.0 * il * jz, -2.0 * il * jz, I * p.omega_o, z, -2.0 * il * x,
        2.0 * il * jz, 2.0 * il * jz, z, -I * p.omega_o, 2.0 * il * x,
        d, d, -il * x, il * x, z,
    ];
    Mat5::from_row_slice(&rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeLabel {
    PhotonLike,
    ExcitonLike,
    ZeroMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolaritonSpectrum {
    pub eigenvalues: [C64; 5],
    pub labels: [ModeLabel; 5],
    /// `‖V‖₁‖V⁻¹‖₁` of the eigenvector matrix; large near exceptional points.
    pub condition: f64,
}

impl PolaritonSpectrum {
    pub fn max_real(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Eigenvalues other than the zero mode.
    pub fn nonzero(&self) -> Vec<C64> {
        (0..5)
            .filter(|&k| self.labels[k] != ModeLabel::ZeroMode)
            .map(|k| self.eigenvalues[k])
            .collect()
    }
}

const ZERO_MODE_TOL: f64 = 1e-10;

pub fn eigen_spectrum(m: &StabilityMatrix) -> PolaritonSpectrum {
    let e = linalg::eigen(&m.m);
    let mut values = e.values;
    linalg::merge_clusters(&mut values);
    let scale = linalg::norm1(&m.m).max(1.0);
    let mut items: Vec<(C64, ModeLabel)> = (0..5)
        .map(|k| {
            let v = e.vectors.column(k);
            let w = (v[0].norm_sqr() + v[1].norm_sqr()) / v.norm_squared();
            (values[k], if w >= 0.5 { ModeLabel::PhotonLike } else { ModeLabel::ExcitonLike })
        })
        .collect();
    // the single smallest eigenvalue is the conserved spin-length mode
    let kmin = (0..5)
        .min_by(|&a, &b| items[a].0.norm().total_cmp(&items[b].0.norm()))
        .unwrap();
    if items[kmin].0.norm() <= ZERO_MODE_TOL * scale {
        items[kmin].1 = ModeLabel::ZeroMode;
    }
    items.sort_by(|a, b| b.0.im.total_cmp(&a.0.im).then(b.0.re.total_cmp(&a.0.re)));
    let condition = match &e.inverse {
        Some(inv) => linalg::norm1(&e.vectors) * linalg::norm1(inv),
        None => f64::INFINITY,
    };
    PolaritonSpectrum {
        eigenvalues: std::array::from_fn(|k| items[k].0),
        labels: std::array::from_fn(|k| items[k].1),
        condition,
    }
}

/// `ω_±` of the dissipation-free normal branch.
pub fn polariton_frequencies_closed_form(p: &ModelParams) -> Result<(f64, f64)> {
    let (wk, wo, l) = (p.omega_k, p.omega_o, p.lambda);
    let s = wk * wk + wo * wo;
    let root = ((wk * wk - wo * wo).powi(2) + 16.0 * l * l * wk * wo).sqrt();
    let plus = ((s + root) / 2.0).sqrt();
    // (s − root)/2 rewritten as a product to avoid cancellation near λ_c
    let minus2 = 2.0 * wk * wk * wo * wo * (1.0 - 4.0 * l * l / (wk * wo)) / (s + root);
    let lc0 = (wk * wo).sqrt() / 2.0;
    if l > lc0 {
        return Err(Error::ImaginaryBranch);
    }
    Ok((plus, minus2.max(0.0).sqrt()))
}

/// Steady state of a given branch, or an error when that branch does not exist.
pub fn steady_state(p: &ModelParams, branch: Branch) -> Result<SteadyState> {
    match branch {
        Branch::NormalGround => Ok(normal_steady_state(p, false)),
        Branch::NormalExcited => Ok(normal_steady_state(p, true)),
        Branch::SuperRadiant => superradiant_steady_state(p),
    }
}

/// Branch choice for scans: normal ground below `λ_c`, super-radiant above;
/// when both candidates exist the one with smaller maximal growth rate wins.
pub fn select_branch(p: &ModelParams) -> Result<(SteadyState, PolaritonSpectrum)> {
    let mut best: Option<(SteadyState, PolaritonSpectrum)> = None;
    for b in [Branch::NormalGround, Branch::SuperRadiant] {
        let Ok(ss) = steady_state(p, b) else { continue };
        let Ok(m) = build_stability_matrix(p, &ss) else { continue };
        let spec = eigen_spectrum(&m);
        let better = match &best {
            None => true,
            Some((_, s)) => spec.max_real() < s.max_real(),
        };
        if better {
            best = Some((ss, spec));
        }
    }
    match best {
        Some((ss, spec)) if spec.max_real() <= STABLE_TOL => Ok((ss, spec)),
        _ => Err(Error::BranchUnavailable(p.lambda)),
    }
}

/// Tolerance on eigenvalue real parts for calling a branch stable.
pub const STABLE_TOL: f64 = 1e-9;
