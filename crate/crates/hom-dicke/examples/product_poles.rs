//! Poles of `S*(ω_L − z) S(ω_L + z)` in the upper half-plane and which of
//! them a given crossing of the rotated line picks up.

use hom_dicke::contour::plan;
use hom_dicke::dicke::*;
use hom_dicke::response::*;

fn main() -> hom_dicke::Result<()> {
    for lambda in [0.0, 0.3, 0.76, 1.0] {
        let p = ModelParams::resonant(1.5, 0.05, lambda)?;
        let (ss, _) = select_branch(&p)?;
        let ps = find_poles(&ResponseFunction::for_state(&p, &ss)?, 1.5, MERGE_TOL)?;
        println!("lambda={lambda}: {} poles, constant {:.3}", ps.len(), ps.constant);
        for q in &ps.poles {
            println!("  rho = {:+.9} {:+.9}i  order {}", q.rho.re, q.rho.im, q.order);
        }
        for (q, t) in [(0.5, 0.0), (-0.5, 0.0), (0.5, 3.0)] {
            let pl = plan(&ps, q, t, 1.0);
            println!("  q={q:+} t={t}: {} inside, {:?}", pl.included_poles.len(), pl.rotation);
        }
    }
    Ok(())
}
