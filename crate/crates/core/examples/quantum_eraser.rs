//! Eraser on a which-way qubit entangled with the particle.
//!
//! Usage: `cargo run --example quantum_eraser -- [a1_re a1_im a2_re a2_im]`
//! (defaults to equal real amplitudes).

use qlang::scenarios::{run_eraser, EraserSpec};
use qlang::C64;

pub fn run(args: &[String]) -> qlang::Result<()> {
    let spec = match args {
        [a, b, c, d] => {
            let p = |s: &String| s.parse::<f64>().map_err(|e| qlang::Error::InvalidParameter(e.to_string()));
            EraserSpec::new(C64::new(p(a)?, p(b)?), C64::new(p(c)?, p(d)?))?
        }
        _ => EraserSpec::default(),
    };
    let result = run_eraser(&spec)?;
    for p in &result.pmfs {
        println!("{:<26} {:?}  none {:.4}", p.label, p.pmf.probabilities(), p.pmf.no_detection());
    }
    for (k, v) in &result.metadata {
        println!("{k}: {v}");
    }
    println!("all checks pass: {}", result.all_pass());
    Ok(())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Err(e) = run(&args) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
