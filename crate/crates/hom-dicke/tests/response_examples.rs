use hom_dicke::dicke::*;
use hom_dicke::oracle::{adaptive, spectral_product_direct};
use hom_dicke::response::*;
use hom_dicke::{Error, C64};
use std::f64::consts::PI;

fn p(kappa: f64, lambda: f64) -> ModelParams {
    ModelParams::resonant(1.5, kappa, lambda).unwrap()
}

fn io(kappa: f64, lambda: f64) -> IOMatrices {
    let q = p(kappa, lambda);
    let (ss, _) = select_branch(&q).unwrap();
    build_io_matrices(&q, &ss).unwrap()
}

fn resp(kappa: f64, lambda: f64) -> ResponseFunction {
    ResponseFunction::new(io(kappa, lambda)).unwrap()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn io_matrix_differences() {
    let m = io(0.05, 0.0);
    let d = m.m_out - m.m_in;
    for r in 0..5 {
        for c in 0..5 {
            let want = if r == c && r < 2 { 0.1 } else { 0.0 };
            assert_eq!(d[(r, c)], re(want));
        }
    }
    let m = io(0.0, 0.3);
    assert_eq!(m.m_out, m.m_in);
    let m = io(0.05, 0.3);
    let nonzero = (m.m_out - m.m_in).iter().filter(|z| z.norm() != 0.0).count();
    assert_eq!(nonzero, 2);
    let q = p(0.05, 0.3);
    assert_eq!(m.m_in, build_stability_matrix(&q, &normal_steady_state(&q, false)).unwrap().m);
}

#[test]
fn transfer_matrix_limits() {
    let m = io(0.05, 0.3);
    let t = transfer_matrix(&m, re(1e9)).unwrap();
    for r in 0..5 {
        for c in 0..5 {
            let want = if r == c { -1.0 } else { 0.0 };
            assert!((t[(r, c)] - want).norm() < 1e-8);
        }
    }
    let m = io(0.0, 0.3);
    for z in [0.37, -2.1, 3.3] {
        let t = transfer_matrix(&m, re(z)).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                let want = if r == c { -1.0 } else { 0.0 };
                assert!((t[(r, c)] - want).norm() < 1e-12);
            }
        }
    }
    // the reverse matrix inverts the forward one
    let m = io(0.05, 0.3);
    let z = C64::new(0.7, 0.2);
    let prod = transfer_matrix(&m, z).unwrap() * reverse_transfer_matrix(&m, z).unwrap();
    for r in 0..5 {
        for c in 0..5 {
            let want = if r == c { 1.0 } else { 0.0 };
            assert!((prod[(r, c)] - want).norm() < 1e-12);
        }
    }
}

#[test]
fn empty_cavity_is_unitary() {
    let r = resp(0.05, 0.0);
    for k in 0..1000 {
        let z = -10.0 + 20.0 * k as f64 / 999.0;
        let s = r.eval(re(z)).unwrap();
        assert!((s.norm() - 1.0).abs() <= 1e-12, "z={z}: {s}");
        // single-mode algebra
        let direct = -(C64::new(0.05, 0.0) + C64::new(0.0, 1.5 - z)) / (C64::new(-0.05, 0.0) + C64::new(0.0, 1.5 - z));
        assert!((s - direct).norm() < 1e-12, "z={z}: {s} vs {direct}");
    }
    for z in [-1e6, 1e6] {
        assert!((r.eval(re(z)).unwrap() + 1.0).norm() < 1e-6);
    }
}

#[test]
fn response_tends_to_minus_one() {
    let r = resp(0.05, 0.3);
    assert_eq!(r.expansion.s_inf, re(-1.0));
    let a = (r.eval(re(1e3)).unwrap() + 1.0).norm();
    let b = (r.eval(re(1e6)).unwrap() + 1.0).norm();
    assert!(b < a && b < 1e-6);
    for z in [0.3, 1.2, -1.7] {
        assert!((r.eval(re(z)).unwrap() - r.eval_pf(re(z))).norm() < 1e-12);
    }
}

#[test]
fn modulus_peaks_at_pole_real_parts() {
    let r = resp(0.05, 0.3);
    let zs: Vec<f64> = (0..=20000).map(|k| 0.5 + 1.5 * k as f64 / 20000.0).collect();
    let m: Vec<f64> = zs.iter().map(|&z| r.eval(re(z)).unwrap().norm()).collect();
    let peaks: Vec<f64> = (1..m.len() - 1).filter(|&k| m[k] > m[k - 1] && m[k] > m[k + 1] && m[k] > 1.001).map(|k| zs[k]).collect();
    let targets: Vec<f64> = r.poles().iter().map(|p| p.re).filter(|x| *x > 0.0).collect();
    assert_eq!(peaks.len(), targets.len(), "{peaks:?} vs {targets:?}");
    for (a, b) in peaks.iter().zip(&targets) {
        // within the linewidth κ/2
        assert!((a - b).abs() < 0.025, "{a} vs {b}");
    }
}

#[test]
fn poles_are_eigenvalues_of_the_input_matrix() {
    let m = io(0.05, 0.3);
    let r = ResponseFunction::new(m.clone()).unwrap();
    let ev = eigen_spectrum(&StabilityMatrix { m: m.m_in }).nonzero();
    assert_eq!(ev.len(), r.poles().len());
    for mu in ev {
        let pole = C64::new(0.0, -1.0) * mu;
        assert!(r.poles().iter().any(|p| (p - pole).norm() < 1e-9), "{pole}");
    }
    for p in r.poles() {
        assert!((p.im - 0.025).abs() <= 1e-9, "{p}");
    }
}

#[test]
fn uncoupled_product_poles_coincide() {
    // the spin lines do not reach the photon channel, so only the cavity line
    // at ω_k + iκ survives and both factors put their pole at iκ
    let r = resp(0.05, 0.0);
    assert_eq!(r.poles().len(), 1);
    assert!((r.poles()[0] - C64::new(1.5, 0.05)).norm() < 1e-12);
    let ps = find_poles(&r, 1.5, MERGE_TOL).unwrap();
    assert_eq!(ps.len(), 1);
    assert_eq!(ps.poles[0].order, 2);
    assert!((ps.poles[0].rho - C64::new(0.0, 0.05)).norm() < 1e-12);
    for z in [0.3, -1.0, 2.5] {
        let direct = spectral_product_direct(&r, 1.5, z).unwrap();
        assert!((ps.eval(re(z)) - direct).norm() < 1e-12);
    }
    // off resonance the lines separate into two simple poles
    let ps = find_poles(&r, 1.4, MERGE_TOL).unwrap();
    assert_eq!(ps.len(), 2);
    assert!(ps.poles.iter().all(|p| p.order == 1));
}

#[test]
fn degenerate_lower_pair_near_critical() {
    let lc = critical_coupling(&p(0.05, 0.0));
    let r = resp(0.05, lc - 1e-4);
    let mut low: Vec<C64> = r.poles().iter().copied().filter(|p| p.re.abs() < 0.5).collect();
    low.sort_by(|a, b| a.im.total_cmp(&b.im));
    assert_eq!(low.len(), 2);
    assert!((low[0].re - low[1].re).abs() < 1e-6, "{low:?}");
    assert!(low[1].im > 1.1 * low[0].im, "{low:?}");
}

#[test]
fn unstable_branch_is_rejected() {
    let q = p(0.05, 0.9);
    let m = build_io_matrices(&q, &normal_steady_state(&q, false)).unwrap();
    assert!(matches!(ResponseFunction::new(m), Err(Error::UnstableBranch(_))));
}

#[test]
fn residue_sum_examples() {
    let empty = PoleSet { poles: vec![], constant: re(1.0), side: vec![] };
    assert_eq!(residue_sum(&empty, 0.3, 1.0, 1.0), re(0.0));
    let one = PoleSet {
        poles: vec![ProductPole { rho: C64::new(0.0, 1.0), order: 2, c: re(0.0), d: re(1.0) }],
        constant: re(0.0),
        side: vec![],
    };
    let want = -4.0 * PI * (-2.0f64).exp();
    assert!((residue_sum(&one, 0.0, 1.0, 1.0) - want).norm() < 1e-14);
}

// ∫(h − c) e^{2izt} dz along the real axis with a weak Gaussian damping;
// the damping only touches the 1/z tail through erf(t/√ε) = 1
fn damped_oracle(r: &ResponseFunction, c: C64, t: f64) -> C64 {
    let eps: f64 = 1e-8;
    let zmax = 6.0 / eps.sqrt();
    let f = |z: f64| (spectral_product_direct(r, 1.5, z).unwrap() - c) * (C64::new(-eps * z * z, 2.0 * z * t)).exp();
    let n0 = (2.0 * zmax * t / PI) as usize * 4;
    adaptive(f, -zmax, zmax, n0, 1e-11, 10_000_000).unwrap().0
}

#[test]
fn residue_sum_matches_damped_real_axis_integral() {
    let r = resp(0.05, 0.3);
    let ps = find_poles(&r, 1.5, MERGE_TOL).unwrap();
    for t in [0.5, 2.0] {
        let a = residue_sum(&ps, 0.0, t, 1.0);
        let o = damped_oracle(&r, ps.constant, t);
        assert!((a - o).norm() <= 1e-6 * o.norm(), "t={t}: {a} vs {o}");
    }
}
