//! Seeded random instances shared by the integration tests.

#![allow(dead_code)]

use qlang::{COp, CVec, Outcome, Povm, PureState, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> CVec {
    let entries = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CVec::new(entries).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    PureState::normalize(random_vec(rng, dim)).unwrap()
}

/// Orthonormal basis from Gram-Schmidt on random vectors.
pub fn random_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    while basis.len() < dim {
        let mut v = random_vec(rng, dim);
        for b in &basis {
            let c = b.inner(&v).unwrap();
            v = &v - &b.scale(c);
        }
        if let Some(n) = v.normalized() {
            basis.push(n);
        }
    }
    basis
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> COp {
    let basis = random_basis(rng, dim);
    COp::from_fn(dim, |i, j| basis[j].entries()[i])
}

/// `outcomes` effects built from a random basis: coarse-grained spectral
/// projectors mixed with white noise and scaled by `total`.
pub fn random_povm_in(rng: &mut ChaCha8Rng, basis: &[CVec], outcomes: usize, total: f64) -> Povm {
    let dim = basis.len();
    let noise: f64 = rng.gen_range(0.0..0.5);
    let mut projectors = vec![COp::zeros(dim); outcomes];
    for (k, b) in basis.iter().enumerate() {
        let slot = if k < outcomes { k } else { rng.gen_range(0..outcomes) };
        projectors[slot] = &projectors[slot] + &COp::projector(b);
    }
    let white = COp::identity(dim).scale_real(noise / outcomes as f64);
    let effects = projectors.iter().map(|p| (&p.scale_real(1.0 - noise) + &white).scale_real(total)).collect();
    Povm::new((1..=outcomes as i64).map(Outcome::int).collect(), effects).unwrap()
}

pub fn random_povm(rng: &mut ChaCha8Rng, dim: usize, outcomes: usize) -> Povm {
    let basis = random_basis(rng, dim);
    random_povm_in(rng, &basis, outcomes, 1.0)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
