//! Two-dimensional double-slit apparatus on a grid: hard-wall geometry,
//! split Crank–Nicolson propagation, screen binning and the
//! interference/which-way comparison.

mod detector;
mod evolve;
mod grid;
mod potential;

use std::ops::RangeInclusive;

use serde::Serialize;

pub use detector::{bin_probabilities, detector_pmf, fringe_visibility, which_way_mass, DetectorBinning, WhichWayMass};
pub use evolve::{evolve, evolve_adjoint, max_stable_dt, Evolver};
pub use grid::{init_packet, Grid2D, PhysicalParams, WavePacket2D};
pub use potential::{build_potential, separator_mask, Absorber, Branch, Potential2D, SlitGeometry};

use crate::error::{Error, Result};
use crate::kernel::C64;
use crate::measurement::Pmf;

/// Everything needed to run the apparatus end to end.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoubleSlitConfig {
    pub grid: Grid2D,
    pub params: PhysicalParams,
    pub geometry: SlitGeometry,
    /// Initial packet centre.
    pub source: (f64, f64),
    pub dt: f64,
    pub max_steps: usize,
    /// Stop once this fraction of the probability past the slit plane lies
    /// beyond the screen.
    pub stop_fraction: f64,
    /// Transmitted probability required before the stopping test applies.
    pub min_transmitted: f64,
    /// Visibility is taken over bins `±1 ..= ±visibility_bins`.
    pub visibility_bins: i64,
    pub smoothing: usize,
    pub shots: usize,
    pub seed: u64,
}

impl Default for DoubleSlitConfig {
    /// 512 x 384 cells of side 0.1 in units with `ħ = m = 1`.
    fn default() -> Self {
        let spacing = 0.1;
        DoubleSlitConfig {
            grid: Grid2D::with_spacing(512, 384, spacing).expect("static grid"),
            params: PhysicalParams { hbar: 1.0, mass: 1.0, k0: 5.0, sigma: 2.0, delta: 0.4, b: 32.0 },
            geometry: SlitGeometry {
                apex_x: 2.0,
                slit_x: 20.0,
                wedge_half_width: 16.2,
                hole_center: 2.0,
                hole_half_width: 0.8,
                wall_thickness: 0.2,
                splitter_tip_x: None,
                separator_end_x: None,
                block_upper: false,
                block_lower: false,
                absorber: Some(Absorber { width: 2.0, strength: 60.0 }),
            },
            source: (12.5, 0.0),
            dt: 0.005,
            max_steps: 4000,
            stop_fraction: 0.9,
            min_transmitted: 0.01,
            visibility_bins: 20,
            smoothing: 0,
            shots: 100_000,
            seed: 7,
        }
    }
}

impl DoubleSlitConfig {
    /// 192 x 128 cells with the same spacing and a scaled-down apparatus;
    /// seconds instead of minutes.
    pub fn compact() -> Self {
        DoubleSlitConfig {
            grid: Grid2D::with_spacing(192, 128, 0.1).expect("static grid"),
            params: PhysicalParams { hbar: 1.0, mass: 1.0, k0: 5.0, sigma: 1.0, delta: 0.2, b: 12.0 },
            geometry: SlitGeometry {
                apex_x: 1.2,
                slit_x: 8.0,
                wedge_half_width: 5.2,
                hole_center: 1.0,
                hole_half_width: 0.4,
                wall_thickness: 0.2,
                splitter_tip_x: None,
                separator_end_x: None,
                block_upper: false,
                block_lower: false,
                absorber: Some(Absorber { width: 1.0, strength: 60.0 }),
            },
            source: (5.0, 0.0),
            max_steps: 1500,
            visibility_bins: 16,
            ..Self::default()
        }
    }

    pub fn binning(&self) -> Result<DetectorBinning> {
        DetectorBinning::new(self.params.b, self.params.delta)
    }

    pub fn window(&self) -> RangeInclusive<i64> {
        -self.visibility_bins..=self.visibility_bins
    }

    pub fn potential(&self, branch: Branch) -> Result<Potential2D> {
        build_potential(&self.grid, &self.params, branch, &self.geometry)
    }

    pub fn initial_packet(&self) -> Result<WavePacket2D> {
        init_packet(&self.grid, &self.params, self.source)
    }

    fn validate(&self) -> Result<()> {
        if !(self.stop_fraction > 0.0 && self.stop_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!("stop fraction {} outside (0, 1]", self.stop_fraction)));
        }
        if self.visibility_bins < 1 {
            return Err(Error::InvalidParameter("visibility window needs at least one bin".into()));
        }
        Ok(())
    }
}

/// Why a propagation ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopReason {
    ScreenReached,
    StepCap,
}

/// Outcome of propagating one branch.
#[derive(Clone, Debug)]
pub struct BranchRun {
    pub branch: Branch,
    pub packet: WavePacket2D,
    pub steps: usize,
    pub stop: StopReason,
    pub pmf: Pmf,
    pub which_way: WhichWayMass,
    pub visibility: f64,
}

/// Probability with `x >= from` (excluding wall cells, which hold nothing).
fn mass_beyond(packet: &WavePacket2D, from: f64) -> f64 {
    let g = packet.grid();
    let first = (0..g.nx).find(|&i| g.x(i) >= from).unwrap_or(g.nx);
    let mut total = 0.0;
    for j in 0..g.ny {
        let row = &packet.amplitudes()[g.index(0, j)..g.index(0, j) + g.nx];
        total += row[first..].iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    total * g.cell_area()
}

fn summarize(
    config: &DoubleSlitConfig,
    branch: Branch,
    packet: WavePacket2D,
    steps: usize,
    stop: StopReason,
) -> Result<BranchRun> {
    let binning = config.binning()?;
    let pmf = detector_pmf(&packet, &binning)?;
    let which_way = which_way_mass(&packet, &binning);
    let visibility = fringe_visibility(&pmf, config.window(), config.smoothing)?;
    Ok(BranchRun { branch, packet, steps, stop, pmf, which_way, visibility })
}

/// Propagates until the stopping rule fires or `max_steps` is reached.
pub fn run_branch(config: &DoubleSlitConfig, branch: Branch) -> Result<BranchRun> {
    config.validate()?;
    let potential = config.potential(branch)?;
    let mut packet = config.initial_packet()?;
    let mut evolver = Evolver::new(&potential, config.dt)?;
    let past_slit = config.geometry.slit_x + config.geometry.wall_thickness;
    let mut stop = StopReason::StepCap;
    while evolver.steps_taken() < config.max_steps {
        evolver.step(&mut packet)?;
        let transmitted = mass_beyond(&packet, past_slit);
        if transmitted >= config.min_transmitted
            && mass_beyond(&packet, config.params.b) >= config.stop_fraction * transmitted
        {
            stop = StopReason::ScreenReached;
            break;
        }
    }
    let steps = evolver.steps_taken();
    summarize(config, branch, packet, steps, stop)
}

/// Propagates for exactly `steps` steps with the given geometry.
pub fn run_fixed(
    config: &DoubleSlitConfig,
    geometry: &SlitGeometry,
    branch: Branch,
    steps: usize,
) -> Result<BranchRun> {
    config.validate()?;
    let potential = build_potential(&config.grid, &config.params, branch, geometry)?;
    let packet = evolve(&config.initial_packet()?, &potential, config.dt, steps)?;
    summarize(config, branch, packet, steps, StopReason::StepCap)
}

/// Branch 2 against the single-hole runs at the same time.
#[derive(Clone, Debug)]
pub struct SuperpositionCheck {
    pub steps: usize,
    /// Half the L1 distance over bins `n != 0` between the branch-2 pmf and
    /// the upper bins of the hole-A-only run joined with the lower bins of
    /// the hole-B-only run.
    pub total_variation: f64,
    pub upper_only: Pmf,
    pub lower_only: Pmf,
}

pub fn superposition_check(config: &DoubleSlitConfig, branch_two: &BranchRun) -> Result<SuperpositionCheck> {
    let steps = branch_two.steps;
    let upper_only = run_fixed(config, &config.geometry.with_blocked(false, true), Branch::Two, steps)?.pmf;
    let lower_only = run_fixed(config, &config.geometry.with_blocked(true, false), Branch::Two, steps)?.pmf;
    let both = bin_probabilities(&branch_two.pmf);
    let upper = bin_probabilities(&upper_only);
    let lower = bin_probabilities(&lower_only);
    let mut l1 = 0.0;
    for (&n, &p) in both.iter().filter(|(n, _)| **n != 0) {
        let oracle = if n > 0 { upper.get(&n) } else { lower.get(&n) }.copied().unwrap_or(0.0);
        l1 += (p - oracle).abs();
    }
    Ok(SuperpositionCheck { steps, total_variation: 0.5 * l1, upper_only, lower_only })
}

/// `‖Φ₁F(Ξ) Φ₂F(Γ) v - Φ₂F(Γ) Φ₁F(Ξ) v‖` on the grid, where `Φ_k F(S) v`
/// is `U_k^* χ_S U_k v` with `U_k` the `steps`-step propagator of branch
/// `k` and `χ_S` the indicator of the detector bins in `S`.
pub fn grid_commutator_spot_check(
    config: &DoubleSlitConfig,
    steps: usize,
    xi: &[i64],
    gamma: &[i64],
    v: &WavePacket2D,
) -> Result<f64> {
    let binning = config.binning()?;
    let v1 = config.potential(Branch::One)?;
    let v2 = config.potential(Branch::Two)?;
    let pull_back = |potential: &Potential2D, bins: &[i64], w: &WavePacket2D| -> Result<WavePacket2D> {
        let mut forward = evolve(w, potential, config.dt, steps)?;
        let g = *forward.grid();
        let masked: Vec<C64> = (0..g.len())
            .map(|k| {
                let (i, j) = (k % g.nx, k / g.nx);
                if bins.contains(&binning.bin(g.x(i), g.y(j))) {
                    forward.amplitudes()[k]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        forward = WavePacket2D::from_amplitudes(g, masked)?;
        evolve_adjoint(&forward, potential, config.dt, steps)
    };
    let a = pull_back(&v1, xi, &pull_back(&v2, gamma, v)?)?;
    let b = pull_back(&v2, gamma, &pull_back(&v1, xi, v)?)?;
    let diff = WavePacket2D::combine(C64::new(1.0, 0.0), &a, C64::new(-1.0, 0.0), &b)?;
    Ok(diff.norm_sqr().sqrt())
}

/// Shot counts per outcome label, no-detection last as `"none"`.
pub fn shot_histogram(pmf: &Pmf, shots: usize, seed: u64) -> Vec<(String, u64)> {
    use crate::measurement::Shot;
    let mut counts: Vec<(String, u64)> = pmf.entries().iter().map(|(o, _)| (o.to_string(), 0)).collect();
    counts.push(("none".into(), 0));
    let index: std::collections::HashMap<String, usize> =
        counts.iter().enumerate().map(|(k, (label, _))| (label.clone(), k)).collect();
    for shot in pmf.sample(shots, seed) {
        let k = match shot {
            Shot::Detected(o) => index[&o.to_string()],
            Shot::NoDetection => counts.len() - 1,
        };
        counts[k].1 += 1;
    }
    counts
}
