//! A small coupling sweep written to disk as CSV traces with JSON sidecars.

use hom_dicke::config::ScanConfig;
use hom_dicke::output::emit_scan;
use hom_dicke::scan::*;

fn main() -> hom_dicke::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "scan-out".into());
    let mut cfg = ScanConfig::default();
    cfg.apply_overrides([
        ("lambda_min", "0.05"),
        ("lambda_max", "1.2"),
        ("lambda_count", "6"),
        ("t_min", "-5"),
        ("t_max", "10"),
        ("t_step", "0.5"),
        ("output_dir", dir.as_str()),
    ])?;
    let scan = run_lambda_scan(&cfg)?;
    let (spectra, _) = run_spectrum_scan(&cfg)?;
    let (poles, skipped) = pole_trajectories(&cfg)?;
    for p in &scan.points {
        println!("lambda={:.3} {} max quadrature error {:.1e}", p.lambda, p.branch.name(), p.quadrature_error);
    }
    let files = emit_scan(&cfg, &scan, &spectra, &poles, &skipped)?;
    println!("wrote {} files to {dir}", files.len());
    Ok(())
}
