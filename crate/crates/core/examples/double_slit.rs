//! Double slit with and without the separating wall behind the slits.
//!
//! Runs the compact apparatus; pass `--full` for the 512 x 384 default,
//! which takes about a minute per branch.

use qlang::doubleslit::{run_branch, superposition_check, Branch, DoubleSlitConfig};

pub fn run(full: bool) -> qlang::Result<()> {
    let config = if full { DoubleSlitConfig::default() } else { DoubleSlitConfig::compact() };
    println!(
        "grid {} x {}, dt {}, max dt {:.4}",
        config.grid.nx,
        config.grid.ny,
        config.dt,
        qlang::doubleslit::max_stable_dt(&config.potential(Branch::One)?)
    );
    for branch in [Branch::One, Branch::Two] {
        let run = run_branch(&config, branch)?;
        println!(
            "branch {branch}: {} steps ({:?}), visibility {:.3}, upper/lower mass {:.4}/{:.4}, absorbed {:.2e}",
            run.steps,
            run.stop,
            run.visibility,
            run.which_way.upper,
            run.which_way.lower,
            run.packet.absorbed()
        );
        let bars: String = (-config.visibility_bins..=config.visibility_bins)
            .map(|n| {
                let p = run.pmf.probability(&n.into()).unwrap_or(0.0);
                [' ', '.', ':', '|', '#'][((p * 80.0).sqrt() * 4.0).min(4.0) as usize]
            })
            .collect();
        println!("  [{bars}]");
        if branch == Branch::Two {
            let check = superposition_check(&config, &run)?;
            println!("  hole-by-hole superposition distance {:.2e}", check.total_variation);
        }
    }
    Ok(())
}

fn main() {
    let full = std::env::args().any(|a| a == "--full");
    if let Err(e) = run(full) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
