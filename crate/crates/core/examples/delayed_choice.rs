//! Delayed-choice interferometer as causal maps.
//!
//! One pass through the phase shifter, read in the `f` basis, gives an even
//! split. Two passes, read in the `g` basis, send everything to `g2`.

use qlang::scenarios::run_wheeler;

pub fn run() -> qlang::Result<()> {
    let result = run_wheeler()?;
    for p in &result.pmfs {
        println!("{:<32} {:?}", p.label, p.pmf.probabilities());
    }
    for check in &result.identities {
        println!("{:<52} residual {:.1e}  {}", check.name, check.residual, if check.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
