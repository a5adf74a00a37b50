//! Three boxes: the two box observables do not commute, so there is no
//! joint observable, but the formal product still yields conditional values
//! `1, 1, -1` given the final outcome.

use qlang::measurement::{formal_product, product_observable, weak_values, COMMUTE_TOL};
use qlang::{CVec, Error, Outcome, Povm, PureState};

pub fn run() -> qlang::Result<()> {
    let f = |i| CVec::basis(3, i);
    let third = 1.0 / 3f64.sqrt();
    let u = PureState::new(CVec::from_real(&[third, third, third])?)?;
    let v = CVec::from_real(&[third, third, -third])?;
    let w = (&f(0) - &v.scale_real(v.inner(&f(0))?.re)).normalized().expect("independent");
    let x = (&(&f(1) - &v.scale_real(v.inner(&f(1))?.re)) - &w.scale_real(w.inner(&f(1))?.re))
        .normalized()
        .expect("independent");
    let final_obs = Povm::from_projectors(&[v, w, x])?;
    let boxes = Povm::from_projectors(&[f(0), f(1), f(2)])?;

    match product_observable(&final_obs, &boxes, COMMUTE_TOL) {
        Err(Error::NonCommuting { left, right, norm }) => {
            println!("no product observable: [{left}, {right}] has norm {norm:.3}")
        }
        other => println!("unexpected: {other:?}"),
    }
    let formal = formal_product(&final_obs, &boxes)?;
    println!("formal product Hermiticity residual {:.3}", formal.hermiticity_residual());

    for (o, z) in weak_values(&final_obs, &[Outcome::int(1)], &boxes, &u)? {
        println!("box {o} given final outcome 1: {:+.6}", z.re);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
