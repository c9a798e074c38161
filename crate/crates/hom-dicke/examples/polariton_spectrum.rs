//! Fluctuation eigenvalues on the normal branch, compared with the lossless
//! closed form, and their damping once the cavity leaks.

use hom_dicke::dicke::*;

fn main() -> hom_dicke::Result<()> {
    println!("lossless");
    for lambda in [0.1, 0.3, 0.5, 0.7] {
        let p = ModelParams::resonant(1.5, 0.0, lambda)?;
        let sp = eigen_spectrum(&build_stability_matrix(&p, &normal_steady_state(&p, false))?);
        let (hi, lo) = polariton_frequencies_closed_form(&p)?;
        let mut im: Vec<f64> = sp.nonzero().iter().map(|z| z.im.abs()).collect();
        im.sort_by(f64::total_cmp);
        println!("  lambda={lambda}: numeric {:.12} {:.12}  closed {hi:.12} {lo:.12}", im[3], im[0]);
    }
    println!("kappa = 0.05");
    for lambda in [0.01, 0.025, 0.3, 0.75, 0.7515] {
        let p = ModelParams::resonant(1.5, 0.05, lambda)?;
        let (_, sp) = select_branch(&p)?;
        let ev: Vec<String> = sp.nonzero().iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
        println!("  lambda={lambda}: {}  cond={:.1e}", ev.join(" "), sp.condition);
    }
    Ok(())
}
