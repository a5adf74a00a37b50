//! States, observables and the probability rule on a qubit.
//!
//! Builds the computational and diagonal bases, evaluates both on the same
//! state, then draws seeded shots and compares frequencies.

use qlang::measurement::{axiom1_pmf, commute, sample, COMMUTE_TOL};
use qlang::{CVec, Povm, PureState, Shot};

pub fn run() -> qlang::Result<()> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o_f = Povm::from_projectors(&[CVec::basis(2, 0), CVec::basis(2, 1)])?;
    let o_g = Povm::from_projectors(&[CVec::from_real(&[s, s])?, CVec::from_real(&[s, -s])?])?;

    let u = PureState::normalize(CVec::from_real(&[3.0, 4.0])?)?;
    for (name, obs) in [("O_f", &o_f), ("O_g", &o_g)] {
        let pmf = axiom1_pmf(obs, &u)?;
        println!("{name}: {:?}  no detection {:.3e}", pmf.probabilities(), pmf.no_detection());
    }
    println!("O_f and O_g commute: {}", commute(&o_f, &o_g, COMMUTE_TOL)?);

    let shots = sample(&o_f, &u, 10_000, 1)?;
    let first = shots.iter().filter(|s| matches!(s, Shot::Detected(o) if o.to_string() == "1")).count();
    println!("outcome 1 in {first} of {} shots (expected {:.0})", shots.len(), 0.36 * shots.len() as f64);
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
