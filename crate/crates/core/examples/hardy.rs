//! Hardy's set-up on two qubits, including the conditional formal values of
//! `O_ff` given the `(2,2)` outcome of `Psi O_gg`. One of them is negative.

use qlang::scenarios::run_hardy;

pub fn run() -> qlang::Result<()> {
    let result = run_hardy()?;
    for p in &result.pmfs {
        let outcomes: Vec<String> = p.pmf.entries().iter().map(|(o, q)| format!("{o}: {q:.4}")).collect();
        println!("{}: {}  (none: {:.4})", p.label, outcomes.join(", "), p.pmf.no_detection());
    }
    for v in &result.weak_values {
        println!("{}", v.label);
        for (o, z) in &v.values {
            println!("  {o}: {:+.4} {:+.4}i", z.re, z.im);
        }
    }
    println!("all checks pass: {}", result.all_pass());
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
