//! Grid-level properties on the compact apparatus.

use proptest::prelude::*;
use qlang::doubleslit::{
    detector_pmf, evolve, evolve_adjoint, grid_commutator_spot_check, init_packet, run_branch, which_way_mass, Branch,
    DoubleSlitConfig, WavePacket2D,
};
use qlang::{Outcome, C64};

fn config() -> DoubleSlitConfig {
    DoubleSlitConfig::compact()
}

/// Copy of `packet` with amplitudes outside `keep` set to zero.
fn restrict(packet: &WavePacket2D, keep: impl Fn(f64, f64) -> bool) -> WavePacket2D {
    let g = *packet.grid();
    let amps = (0..g.len())
        .map(|k| {
            let (i, j) = (k % g.nx, k / g.nx);
            if keep(g.x(i), g.y(j)) {
                packet.amplitudes()[k]
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    WavePacket2D::from_amplitudes(g, amps).unwrap()
}

#[test]
fn masking_is_idempotent() {
    let c = config();
    let potential = c.potential(Branch::Two).unwrap();
    let mut once = c.initial_packet().unwrap();
    // put some amplitude on the walls first
    once = WavePacket2D::from_amplitudes(*once.grid(), once.amplitudes().iter().map(|z| z + 0.01).collect()).unwrap();
    potential.apply_mask(&mut once);
    let mut twice = once.clone();
    potential.apply_mask(&mut twice);
    assert!(once.wall_loss() > 0.0);
    assert_eq!(once.amplitudes(), twice.amplitudes());
    assert_eq!(once.wall_loss(), twice.wall_loss());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn evolution_is_linear(
        ar in -1.0..1.0f64, ai in -1.0..1.0f64, br in -1.0..1.0f64, bi in -1.0..1.0f64,
        y0 in -1.5..1.5f64, steps in 1usize..40,
    ) {
        let c = config();
        let potential = c.potential(Branch::One).unwrap();
        let p1 = c.initial_packet().unwrap();
        let p2 = init_packet(&c.grid, &c.params, (4.0, y0)).unwrap();
        let (a, b) = (C64::new(ar, ai), C64::new(br, bi));
        let lhs = evolve(&WavePacket2D::combine(a, &p1, b, &p2).unwrap(), &potential, c.dt, steps).unwrap();
        let e1 = evolve(&p1, &potential, c.dt, steps).unwrap();
        let e2 = evolve(&p2, &potential, c.dt, steps).unwrap();
        let rhs = WavePacket2D::combine(a, &e1, b, &e2).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-8);
    }
}

#[test]
fn heisenberg_and_schrodinger_bin_probabilities_agree() {
    let c = config();
    let steps = 320;
    let binning = c.binning().unwrap();
    let potential = c.potential(Branch::One).unwrap();
    let u0 = c.initial_packet().unwrap();
    let forward = evolve(&u0, &potential, c.dt, steps).unwrap();
    let pmf = detector_pmf(&forward, &binning).unwrap();
    let mut checked = 0;
    for n in [-6i64, -1, 1, 2, 5] {
        let Some(direct) = pmf.probability(&Outcome::int(n)) else { continue };
        let chi = restrict(&forward, |x, y| binning.bin(x, y) == n);
        let pulled = evolve_adjoint(&chi, &potential, c.dt, steps).unwrap();
        let heisenberg = u0.inner(&pulled).unwrap();
        assert!((heisenberg.re - direct).abs() <= 1e-10, "bin {n}: {} vs {direct}", heisenberg.re);
        assert!(heisenberg.im.abs() <= 1e-10);
        checked += 1;
    }
    assert!(checked >= 3);
}

#[test]
fn separator_blocks_flux_from_an_upper_packet() {
    let c = DoubleSlitConfig { geometry: config().geometry.with_blocked(false, true), ..config() };
    let potential = c.potential(Branch::Two).unwrap();
    let upper = restrict(&c.initial_packet().unwrap(), |_, y| y > 0.0);
    let out = evolve(&upper, &potential, c.dt, 400).unwrap();
    let g = *out.grid();
    let past_slit = c.geometry.slit_x + c.geometry.wall_thickness;
    let lower: f64 = (0..g.len())
        .filter(|&k| g.y(k / g.nx) < 0.0 && g.x(k % g.nx) > past_slit)
        .map(|k| out.amplitudes()[k].norm_sqr())
        .sum::<f64>()
        * g.cell_area();
    let transmitted: f64 =
        (0..g.len()).filter(|&k| g.x(k % g.nx) > past_slit).map(|k| out.amplitudes()[k].norm_sqr()).sum::<f64>()
            * g.cell_area();
    assert!(transmitted > 1e-2, "nothing got through: {transmitted}");
    assert!(lower <= 1e-6, "lower-half mass {lower}");
    assert!(which_way_mass(&out, &c.binning().unwrap()).lower <= 1e-6);
}

#[test]
fn symmetric_packet_splits_evenly_in_branch_two() {
    let run = run_branch(&config(), Branch::Two).unwrap();
    let ww = run.which_way;
    assert!(ww.upper > 0.05);
    assert!((ww.upper - ww.lower).abs() <= 0.02 * ww.upper.max(ww.lower), "{ww:?}");
}

#[test]
fn branch_detectors_do_not_commute_on_the_grid() {
    let c = config();
    let u0 = c.initial_packet().unwrap();
    let norm = grid_commutator_spot_check(&c, 200, &[1, 2, 3], &[-3, -2, -1], &u0).unwrap();
    assert!(norm > 1e-6, "commutator applied to u0 has norm {norm}");
}
