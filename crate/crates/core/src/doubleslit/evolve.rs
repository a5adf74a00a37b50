//! Split Crank–Nicolson stepping for `iħ ∂ψ/∂t = -(ħ²/2m) Δψ` with hard
//! walls. Each step applies the Cayley transform of the x and y second
//! differences (tridiagonal solves along grid lines), alternating the order
//! on successive steps, then the absorbing layer. Wall cells are identity
//! rows with zero right-hand side, so they stay at zero.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::grid::WavePacket2D;
use super::potential::Potential2D;
use crate::error::{Error, Result};
use crate::kernel::C64;

/// Largest accepted time step: the Cayley phase of the fastest resolvable
/// carrier (`k = π / 2h`) stays below one radian.
pub fn max_stable_dt(potential: &Potential2D) -> f64 {
    let g = potential.grid();
    let h = g.dx().min(g.dy());
    8.0 * potential.mass() * h * h / (PI * PI * potential.hbar())
}

/// Reusable stepper bound to one potential and time step.
pub struct Evolver<'a> {
    potential: &'a Potential2D,
    dt: f64,
    beta_x: C64,
    beta_y: C64,
    mask_t: Vec<bool>,
    sponge: Vec<(usize, f64)>,
    steps_taken: usize,
    transposed: Vec<C64>,
}

impl<'a> Evolver<'a> {
    pub fn new(potential: &'a Potential2D, dt: f64) -> Result<Self> {
        let limit = max_stable_dt(potential);
        if !dt.is_finite() || dt <= 0.0 || dt > limit {
            return Err(Error::StabilityViolation(format!("dt = {dt} outside (0, {limit}]")));
        }
        let g = potential.grid();
        let coeff = |h: f64| C64::new(0.0, dt * potential.hbar() / (4.0 * potential.mass() * h * h));
        let mut mask_t = vec![false; g.len()];
        for j in 0..g.ny {
            for i in 0..g.nx {
                mask_t[i * g.ny + j] = potential.blocked()[g.index(i, j)];
            }
        }
        let sponge = potential
            .damping()
            .iter()
            .enumerate()
            .filter(|(_, gamma)| **gamma > 0.0)
            .map(|(k, gamma)| (k, (-gamma * dt).exp()))
            .collect();
        Ok(Evolver {
            potential,
            dt,
            beta_x: coeff(g.dx()),
            beta_y: coeff(g.dy()),
            mask_t,
            sponge,
            steps_taken: 0,
            transposed: vec![C64::new(0.0, 0.0); g.len()],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    fn check(&self, packet: &WavePacket2D) -> Result<()> {
        if packet.grid() != self.potential.grid() {
            return Err(Error::InvalidParameter("packet and potential use different grids".into()));
        }
        Ok(())
    }

    /// Advances one step.
    pub fn step(&mut self, packet: &mut WavePacket2D) -> Result<()> {
        self.check(packet)?;
        if self.steps_taken == 0 {
            self.potential.apply_mask(packet);
        }
        let x_first = self.steps_taken.is_multiple_of(2);
        let area = packet.grid().cell_area();
        let psi = packet.amplitudes_mut();
        if x_first {
            self.sweep_x(psi, self.beta_x);
            self.sweep_y(psi, self.beta_y);
        } else {
            self.sweep_y(psi, self.beta_y);
            self.sweep_x(psi, self.beta_x);
        }
        let mut absorbed = 0.0;
        for &(k, f) in &self.sponge {
            let p = psi[k].norm_sqr();
            absorbed += p * (1.0 - f * f);
            psi[k] *= f;
        }
        packet.record(absorbed * area, 0.0, self.dt);
        self.steps_taken += 1;
        Ok(())
    }

    pub fn run(&mut self, packet: &mut WavePacket2D, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(packet)?;
        }
        Ok(())
    }

    /// Applies the adjoint of `steps` forward steps taken from a fresh
    /// stepper: `(S_{n-1} ⋯ S_0)^*`. Bookkeeping fields are left untouched.
    pub fn run_adjoint(&mut self, packet: &mut WavePacket2D, steps: usize) -> Result<()> {
        self.check(packet)?;
        let psi = packet.amplitudes_mut();
        for n in (0..steps).rev() {
            for &(k, f) in &self.sponge {
                psi[k] *= f;
            }
            if n % 2 == 0 {
                self.sweep_y(psi, -self.beta_y);
                self.sweep_x(psi, -self.beta_x);
            } else {
                self.sweep_x(psi, -self.beta_x);
                self.sweep_y(psi, -self.beta_y);
            }
        }
        for (z, blocked) in psi.iter_mut().zip(self.potential.blocked()) {
            if *blocked {
                *z = C64::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    fn sweep_x(&self, psi: &mut [C64], beta: C64) {
        let g = self.potential.grid();
        let mask = self.potential.blocked();
        psi.par_chunks_mut(g.nx)
            .zip(mask.par_chunks(g.nx))
            .for_each_init(|| LineScratch::new(g.nx), |s, (line, m)| s.cayley(line, m, beta));
    }

    fn sweep_y(&mut self, psi: &mut [C64], beta: C64) {
        let g = *self.potential.grid();
        let (nx, ny) = (g.nx, g.ny);
        let t = &mut self.transposed;
        t.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
            for (j, z) in col.iter_mut().enumerate() {
                *z = psi[j * nx + i];
            }
        });
        t.par_chunks_mut(ny)
            .zip(self.mask_t.par_chunks(ny))
            .for_each_init(|| LineScratch::new(ny), |s, (line, m)| s.cayley(line, m, beta));
        let t = &self.transposed;
        psi.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, z) in row.iter_mut().enumerate() {
                *z = t[i * ny + j];
            }
        });
    }
}

struct LineScratch {
    rhs: Vec<C64>,
    upper: Vec<C64>,
}

impl LineScratch {
    fn new(n: usize) -> Self {
        LineScratch { rhs: vec![C64::new(0.0, 0.0); n], upper: vec![C64::new(0.0, 0.0); n] }
    }

    /// Solves `(1 + βL) ψ' = (1 - βL) ψ` in place, where `L` is the
    /// `(-1, 2, -1)` stencil restricted to open cells with zero boundary
    /// values.
    fn cayley(&mut self, line: &mut [C64], blocked: &[bool], beta: C64) {
        let n = line.len();
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let open = |k: usize| !blocked[k];
        for k in 0..n {
            self.rhs[k] = if open(k) {
                let left = if k > 0 && open(k - 1) { line[k - 1] } else { zero };
                let right = if k + 1 < n && open(k + 1) { line[k + 1] } else { zero };
                (one - 2.0 * beta) * line[k] + beta * (left + right)
            } else {
                zero
            };
        }
        // Thomas elimination: sub-diagonal a_k, diagonal d_k, super-diagonal c_k
        let coupling = |k: usize, other: usize| if open(k) && open(other) { -beta } else { zero };
        let diag = |k: usize| if open(k) { one + 2.0 * beta } else { one };
        let mut prev_upper = zero;
        let mut prev_rhs = zero;
        for k in 0..n {
            let a = if k > 0 { coupling(k, k - 1) } else { zero };
            let c = if k + 1 < n { coupling(k, k + 1) } else { zero };
            let m = diag(k) - a * prev_upper;
            prev_upper = c / m;
            prev_rhs = (self.rhs[k] - a * prev_rhs) / m;
            self.upper[k] = prev_upper;
            self.rhs[k] = prev_rhs;
        }
        line[n - 1] = self.rhs[n - 1];
        for k in (0..n - 1).rev() {
            line[k] = self.rhs[k] - self.upper[k] * line[k + 1];
        }
    }
}

/// `steps` steps of size `dt` from a fresh stepper. `steps = 0` returns the
/// packet untouched.
pub fn evolve(packet: &WavePacket2D, potential: &Potential2D, dt: f64, steps: usize) -> Result<WavePacket2D> {
    let mut out = packet.clone();
    if steps == 0 {
        Evolver::new(potential, dt)?.check(packet)?;
        return Ok(out);
    }
    Evolver::new(potential, dt)?.run(&mut out, steps)?;
    Ok(out)
}

/// Adjoint of [`evolve`]: `⟨evolve(u), v⟩ = ⟨u, evolve_adjoint(v)⟩`.
pub fn evolve_adjoint(packet: &WavePacket2D, potential: &Potential2D, dt: f64, steps: usize) -> Result<WavePacket2D> {
    let mut out = packet.clone();
    Evolver::new(potential, dt)?.run_adjoint(&mut out, steps)?;
    Ok(out)
}
