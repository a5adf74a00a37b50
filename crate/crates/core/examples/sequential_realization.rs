//! Collapsing a tree of observables into one observable at the root.
//!
//! A three-node chain with diagonal observables realizes fine. Two sibling
//! branches whose pulled-back observables fail to commute do not.

use qlang::causality::{realize_sequential, CausalTree};
use qlang::measurement::{axiom1_pmf, COMMUTE_TOL};
use qlang::scenarios::surrogate_noncommutation;
use qlang::{COp, CVec, Povm, PureState, C64};

pub fn run() -> qlang::Result<()> {
    let diag = |d: &[f64]| COp::diagonal(&d.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    let mut tree = CausalTree::new("s", 2);
    let t1 = tree.add_child(tree.root(), "t1", diag(&[1.0, -1.0]))?;
    let t2 = tree.add_child(t1, "t2", COp::identity(2))?;
    let basis = Povm::from_projectors(&[CVec::basis(2, 0), CVec::basis(2, 1)])?;
    tree.set_observable(tree.root(), Povm::existence(2))?;
    tree.set_observable(t1, basis.clone())?;
    tree.set_observable(t2, basis)?;

    let realized = realize_sequential(&tree, COMMUTE_TOL)?;
    let u = PureState::normalize(CVec::from_real(&[1.0, 2.0])?)?;
    let pmf = axiom1_pmf(&realized, &u)?;
    for (o, p) in pmf.entries() {
        println!("{o}: {p:.4}");
    }

    let (left, right, norm) = surrogate_noncommutation()?;
    println!("branch tree fails: {left} vs {right}, commutator norm {norm:.3}");
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
