//! Reflection amplitude of the sample along the real frequency axis.

use hom_dicke::dicke::*;
use hom_dicke::response::*;
use hom_dicke::C64;

fn main() -> hom_dicke::Result<()> {
    let lambda: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.3);
    let p = ModelParams::resonant(1.5, 0.05, lambda)?;
    let (ss, _) = select_branch(&p)?;
    let r = ResponseFunction::for_state(&p, &ss)?;
    println!("branch {} with {} poles", ss.branch.name(), r.poles().len());
    for z in r.poles() {
        println!("  p = {:+.9} {:+.9}i", z.re, z.im);
    }
    println!("z,|S|,arg S");
    for k in 0..=60 {
        let z = -3.0 + 0.1 * k as f64;
        let s = r.eval(C64::new(z, 0.0))?;
        println!("{z:.2},{:.9},{:+.6}", s.norm(), s.arg());
    }
    Ok(())
}
