//! Critical coupling, branch selection and stationarity residuals across λ.

use hom_dicke::dicke::*;

fn main() -> hom_dicke::Result<()> {
    for kappa in [0.0, 0.05, 0.1] {
        let p0 = ModelParams::resonant(1.5, kappa, 0.0)?;
        let lc = critical_coupling(&p0);
        println!("kappa={kappa}: lambda_c={lc:.12}");
        for frac in [0.2, 0.9, 0.999, 1.001, 1.5] {
            let p = p0.with_lambda(frac * lc);
            let (ss, sp) = select_branch(&p)?;
            println!(
                "  lambda={:.6} {:<14} Jz={:+.6} |psi|={:.6} residual={:.1e} max Re mu={:+.3e}",
                p.lambda,
                ss.branch.name(),
                ss.j_z,
                ss.psi.norm(),
                steady_state_residual(&p, &ss),
                sp.max_real()
            );
        }
    }
    Ok(())
}
