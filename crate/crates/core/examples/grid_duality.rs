//! Heisenberg and Schrodinger readings of a detector region agree on the
//! grid, while detectors behind different branches fail to commute.

use qlang::doubleslit::{evolve, evolve_adjoint, grid_commutator_spot_check, Branch, DoubleSlitConfig};

pub fn run() -> qlang::Result<()> {
    let config = DoubleSlitConfig::compact();
    let potential = config.potential(Branch::One)?;
    let u = config.initial_packet()?;
    let steps = 200;

    let forward = evolve(&u, &potential, config.dt, steps)?;
    let back = evolve_adjoint(&forward, &potential, config.dt, steps)?;
    let lhs = forward.inner(&forward)?;
    let rhs = u.inner(&back)?;
    println!("<Uu, Uu> = {:.12}, <u, U*Uu> = {:.12}, gap {:.1e}", lhs.re, rhs.re, (lhs - rhs).norm());

    let norm = grid_commutator_spot_check(&config, steps, &[1, 2, 3], &[-3, -2, -1], &u)?;
    println!("commutator of branch detectors applied to u: {norm:.3e}");
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
