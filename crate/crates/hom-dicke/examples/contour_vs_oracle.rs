//! Compare the rotated-contour evaluation of the interference integral
//! with brute-force real-axis quadrature over a few couplings and delays.

use hom_dicke::biphoton::{BiphotonSpec, CoincidenceModel};
use hom_dicke::contour::QuadratureConfig;
use hom_dicke::dicke::{select_branch, ModelParams};
use hom_dicke::response::ResponseFunction;
use std::time::Instant;

fn main() -> hom_dicke::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let b = args.first().copied().unwrap_or(1.0);
    let spec = BiphotonSpec::new(1.5, b)?;
    let cfg = QuadratureConfig::default();
    for lambda in [0.01, 0.1, 0.3, 0.7, 0.76, 1.0, 1.2] {
        let p = ModelParams::resonant(1.5, 0.05, lambda)?;
        let (ss, _) = select_branch(&p)?;
        let model = CoincidenceModel::new(ResponseFunction::for_state(&p, &ss)?, spec, cfg)?;
        let mut worst: f64 = 0.0;
        let (mut tc, mut to) = (0.0, 0.0);
        for k in 0..25 {
            let t = -5.0 + 25.0 * k as f64 / 24.0;
            let s = Instant::now();
            let c = model.interference(t)?;
            tc += s.elapsed().as_secs_f64();
            let s = Instant::now();
            let o = model.interference_oracle(t)?;
            to += s.elapsed().as_secs_f64();
            let err = (c - o).norm() / o.norm().max(1e-3);
            worst = worst.max(err);
            if err > 1e-6 {
                println!("  t={t:7.3} contour={c:.12} oracle={o:.12} rel={err:.2e}");
            }
        }
        println!(
            "lambda={lambda:5} branch={:?} poles={} worst={worst:.2e} contour {tc:.2}s oracle {to:.2}s",
            ss.branch,
            model.poles.len()
        );
    }
    Ok(())
}
