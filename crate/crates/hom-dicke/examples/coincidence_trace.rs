//! Coincidence probability against delay for one coupling, next to the bare
//! two-photon dip.

use hom_dicke::biphoton::{BiphotonSpec, CoincidenceModel, TraceMeta};
use hom_dicke::contour::QuadratureConfig;
use hom_dicke::dicke::*;
use hom_dicke::response::ResponseFunction;

fn main() -> hom_dicke::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.3);
    let spec = BiphotonSpec::new(1.5, 1.0)?;
    let cfg = QuadratureConfig::default();
    let p = ModelParams::resonant(1.5, 0.05, lambda)?;
    let (ss, _) = select_branch(&p)?;
    let model = CoincidenceModel::new(ResponseFunction::for_state(&p, &ss)?, spec, cfg)?;
    let bare = CoincidenceModel::identity(spec, cfg)?;
    let grid: Vec<f64> = (0..=50).map(|k| -5.0 + 0.5 * k as f64).collect();
    let meta = TraceMeta { params: Some(p), branch: Some(ss.branch), spec };
    let tr = model.trace(&grid, meta)?;
    let id = bare.trace(&grid, TraceMeta { params: None, branch: None, spec })?;
    println!("background {:.12} (mirror {:.12})", tr.background, id.background);
    println!("t,p_c,normalized,mirror");
    let n = tr.normalized();
    for k in 0..grid.len() {
        println!("{:.1},{:.12},{:.9},{:.12}", grid[k], tr.p_c[k], n[k], id.p_c[k]);
    }
    Ok(())
}
