//! Cosine transform of a long broadband trace and how its peaks line up with
//! the real parts of the spectral-product poles.

use hom_dicke::config::ScanConfig;
use hom_dicke::scan::*;

fn main() -> hom_dicke::Result<()> {
    let cfg = ScanConfig::default();
    let spec = cfg.spectrum_spec()?;
    for lambda in [0.3, 0.76, 1.2] {
        let s = Sample::at(&cfg, lambda)?;
        let tr = s.model(spec, &cfg)?.trace(&cfg.spectrum_grid(), s.meta(spec))?;
        let ft = fourier_cosine_transform(&tr, cfg.spectrum.subtract_dip)?;
        println!("lambda={lambda} bin={:.5}", ft.bin);
        for (w, d) in peak_alignment(&ft, cfg.spectrum.peak_threshold) {
            println!("  peak at {w:.5}, {d:.2} bins from the nearest pole");
        }
    }
    Ok(())
}
