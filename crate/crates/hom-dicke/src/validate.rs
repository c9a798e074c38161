//! Self-checks run by the `validate` subcommand. Failures are report
//! entries, not errors.

use crate::biphoton::{CoincidenceModel, ExponentSign};
use crate::config::ScanConfig;
use crate::dicke::{
    build_stability_matrix, critical_coupling, eigen_spectrum, normal_steady_state, polariton_frequencies_closed_form,
    select_branch, steady_state_residual, ModelParams, STABLE_TOL,
};
use crate::response::{build_io_matrices, ResponseFunction};
use crate::{Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst measured error (or the measured value for notes).
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed: measured <= tolerance, measured, tolerance, detail: detail.into() }
}

fn failed(name: &str, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed: false, measured: f64::NAN, tolerance: 0.0, detail: detail.into() }
}

fn raw_params(cfg: &ScanConfig, lambda: f64) -> ModelParams {
    ModelParams { lambda, ..cfg.model }
}

/// Quoted critical couplings against the formula, and the κ at which the
/// quoted value is consistent.
pub fn critical_check(cfg: &ScanConfig) -> Check {
    let at = |k: f64| critical_coupling(&ModelParams { kappa: k, lambda: 0.0, ..cfg.model });
    let e1 = (at(0.1) - 0.751664).abs();
    let e2 = (at(0.05) - 0.750417).abs();
    let quoted = 0.7516;
    let detail = format!(
        "formula gives {:.6} at kappa=0.1 and {:.6} at kappa=0.05 (omega_o, omega_k from config); \
         the quoted lambda_c = {quoted} matches kappa=0.1, not the stated kappa=0.05; \
         configured kappa={} gives {:.6}",
        at(0.1),
        at(0.05),
        cfg.model.kappa,
        at(cfg.model.kappa),
    );
    check("critical_coupling", e1.max(e2), 1e-5, detail)
}

fn steady_state_check(cfg: &ScanConfig) -> (Check, Check) {
    let mut res: f64 = 0.0;
    let mut spin: f64 = 0.0;
    let mut growth = f64::NEG_INFINITY;
    let mut missing = vec![];
    for l in cfg.lambdas() {
        let p = raw_params(cfg, l);
        match select_branch(&p) {
            Ok((ss, sp)) => {
                res = res.max(steady_state_residual(&p, &ss));
                spin = spin.max((ss.spin_length() - 0.25).norm());
                growth = growth.max(sp.max_real());
            }
            Err(e) => missing.push(format!("lambda={l}: {e}")),
        }
    }
    let mut ss = check("steady_state", res, 1e-10, format!("max EOM residual {res:e}, max spin-length error {spin:e} (tolerance 1e-12)"));
    ss.passed &= spin <= 1e-12;
    let mut st = check("stability", growth, STABLE_TOL, "largest eigenvalue real part on the selected branches");
    if !missing.is_empty() {
        st.passed = false;
        st.detail = format!("no stable branch: {}", missing.join("; "));
    }
    (ss, st)
}

/// Numeric eigenvalues of the dissipation-free normal branch against `±iω_±`.
fn closed_form_check(cfg: &ScanConfig) -> Check {
    let base = ModelParams { kappa: 0.0, ..cfg.model };
    let lc0 = (base.omega_k * base.omega_o).sqrt() / 2.0;
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let l = lc0 * k as f64 / 199.0;
        let p = base.with_lambda(l);
        let Ok(m) = build_stability_matrix(&p, &normal_steady_state(&p, false)) else {
            return failed("closed_form", format!("stability matrix failed at lambda={l}"));
        };
        let ev = eigen_spectrum(&m).eigenvalues;
        let Ok((wp, wm)) = polariton_frequencies_closed_form(&p) else {
            return failed("closed_form", format!("closed form unavailable at lambda={l}"));
        };
        for w in [wp, -wp, wm, -wm] {
            let target = C64::new(0.0, w);
            let d = ev.iter().map(|e| (e - target).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    check("closed_form", worst, 1e-9, "200 couplings in [0, lambda_c] at kappa=0")
}

fn unitarity_check(cfg: &ScanConfig) -> Check {
    let p = raw_params(cfg, 0.0);
    let ss = normal_steady_state(&p, false);
    let io = match build_io_matrices(&p, &ss) {
        Ok(io) => io,
        Err(e) => return failed("unitarity", e.to_string()),
    };
    let r = match ResponseFunction::new(io) {
        Ok(r) => r,
        Err(e) => return failed("unitarity", e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let z = -10.0 + 20.0 * k as f64 / 999.0;
        match r.eval(C64::new(z, 0.0)) {
            Ok(s) => worst = worst.max((s.norm() - 1.0).abs()),
            Err(e) => return failed("unitarity", e.to_string()),
        }
    }
    let mut far: f64 = 0.0;
    for z in [-1e6, 1e6] {
        match r.eval(C64::new(z, 0.0)) {
            Ok(s) => far = far.max((s + 1.0).norm()),
            Err(e) => return failed("unitarity", e.to_string()),
        }
    }
    let mut c = check("unitarity", worst, 1e-12, format!("lambda=0, 1000 points in [-10, 10]; |S(±1e6) + 1| = {far:e}"));
    if far > 1e-5 {
        c.passed = false;
    }
    c
}

/// Contour against the real-axis oracle at the ends and middle of the λ grid.
fn contour_check(cfg: &ScanConfig) -> Check {
    let lam = cfg.lambdas();
    let mut pick = vec![lam[0], lam[lam.len() / 2], lam[lam.len() - 1]];
    pick.dedup();
    let spec = match cfg.spec() {
        Ok(s) => s,
        Err(e) => return failed("contour_vs_oracle", e.to_string()),
    };
    let g = cfg.t_grid;
    let delays: Vec<f64> = (0..5).map(|k| g.min + (g.max - g.min) * k as f64 / 4.0).collect();
    let mut worst: f64 = 0.0;
    for l in pick {
        let p = raw_params(cfg, l);
        let run = || -> Result<f64> {
            let (ss, _) = select_branch(&p)?;
            let m = CoincidenceModel::new(ResponseFunction::for_state(&p, &ss)?, spec, cfg.quadrature)?.with_sign(cfg.sign);
            let mut w: f64 = 0.0;
            for &t in &delays {
                let c = m.interference(t)?;
                let o = m.interference_oracle(t)?;
                let d = (c - o).norm();
                w = w.max(if d <= 1e-9 { 0.0 } else { d / o.norm() });
            }
            Ok(w)
        };
        match run() {
            Ok(w) => worst = worst.max(w),
            Err(e) => return failed("contour_vs_oracle", format!("lambda={l}: {e}")),
        }
    }
    check("contour_vs_oracle", worst, 1e-6, "relative error, differences below 1e-9 count as zero")
}

fn hom_dip_check(cfg: &ScanConfig) -> Check {
    let run = || -> Result<(f64, f64)> {
        let m = CoincidenceModel::identity(cfg.spec()?, cfg.quadrature)?;
        Ok((m.probability(0.0)?, m.background))
    };
    match run() {
        Ok((p0, bg)) => check("hom_dip", p0.abs() / bg, 1e-12, format!("identity sample: P_c(0) = {p0:e}, background {bg:e}")),
        Err(e) => failed("hom_dip", e.to_string()),
    }
}

/// `P⁺(t) = P⁻(−t)` must hold; the trace itself is not even in `t`, and the
/// size of `P(t) − P(−t)` is reported.
fn sign_check(cfg: &ScanConfig) -> Check {
    let lam = cfg.lambdas();
    let l = lam[lam.len() - 1];
    let run = || -> Result<(f64, f64)> {
        let p = raw_params(cfg, l);
        let (ss, _) = select_branch(&p)?;
        let r = ResponseFunction::for_state(&p, &ss)?;
        let spec = cfg.spec()?;
        let plus = CoincidenceModel::new(r.clone(), spec, cfg.quadrature)?.with_sign(ExponentSign::Plus);
        let minus = CoincidenceModel::new(r, spec, cfg.quadrature)?.with_sign(ExponentSign::Minus);
        let (mut mirror, mut asym): (f64, f64) = (0.0, 0.0);
        for t in [1.0, 3.0, 7.0] {
            mirror = mirror.max((plus.probability(t)? - minus.probability(-t)?).abs());
            asym = asym.max((plus.probability(t)? - plus.probability(-t)?).abs());
        }
        Ok((mirror, asym))
    };
    match run() {
        Ok((mirror, asym)) => check(
            "exponent_sign",
            mirror,
            1e-12,
            format!(
                "lambda={l}: P+(t) - P-(-t) = {mirror:e}; P(t) - P(-t) up to {asym:e}{}",
                if asym > 1e-12 { ", so the sign choice matters" } else { "" }
            ),
        ),
        Err(e) => failed("exponent_sign", e.to_string()),
    }
}

/// Run the whole suite. Configuration problems become a failed `config`
/// entry; the remaining checks run on whatever can be built.
pub fn validate(cfg: &ScanConfig) -> ValidationReport {
    let mut checks = vec![];
    let config_ok = match cfg.validate() {
        Ok(()) => {
            checks.push(check("config", 0.0, 0.0, "config is valid"));
            true
        }
        Err(e) => {
            checks.push(failed("config", e.to_string()));
            false
        }
    };
    checks.push(critical_check(cfg));
    let (ss, st) = steady_state_check(cfg);
    checks.push(ss);
    checks.push(st);
    checks.push(closed_form_check(cfg));
    checks.push(unitarity_check(cfg));
    if config_ok {
        checks.push(contour_check(cfg));
        checks.push(hom_dip_check(cfg));
        checks.push(sign_check(cfg));
    } else {
        for n in ["contour_vs_oracle", "hom_dip", "exponent_sign"] {
            checks.push(failed(n, "skipped: config invalid"));
        }
    }
    ValidationReport { passed: checks.iter().all(|c| c.passed), checks }
}
