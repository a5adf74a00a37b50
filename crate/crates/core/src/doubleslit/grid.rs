use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::C64;

/// Physical constants and detector layout. Internally everything runs in
/// natural units (`hbar = mass = 1` by default), but the fields stay explicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    /// Mean wavenumber of the initial packet along +x.
    pub k0: f64,
    /// Gaussian width of the initial packet.
    pub sigma: f64,
    /// Height of one detector strip.
    pub delta: f64,
    /// x-coordinate of the screen.
    pub b: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("k0", self.k0),
            ("sigma", self.sigma),
            ("delta", self.delta),
            ("b", self.b),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn velocity(&self) -> f64 {
        self.hbar * self.k0 / self.mass
    }
}

/// Uniform cell-centred grid. Column `i` sits at `x = i * dx`; row `j` sits
/// at `y = (j - ny / 2) * dy`, so `y = 0` is always a grid row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 16 || ny < 16 {
            return Err(Error::InvalidParameter(format!("grid {nx}x{ny} is smaller than 16x16")));
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidParameter("domain extents must be positive".into()));
        }
        Ok(Grid2D { nx, ny, lx, ly })
    }

    /// Grid with square cells of side `spacing`.
    pub fn with_spacing(nx: usize, ny: usize, spacing: f64) -> Result<Self> {
        Self::new(nx, ny, nx as f64 * spacing, ny as f64 * spacing)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row of `y = 0`.
    pub fn center_row(&self) -> usize {
        self.ny / 2
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - self.center_row() as f64) * self.dy()
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn y_min(&self) -> f64 {
        self.y(0)
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.ny - 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Row mirrored through `y = 0`, if it exists on the grid.
    pub fn mirror_row(&self, j: usize) -> Option<usize> {
        let m = 2 * self.center_row() as isize - j as isize;
        (0..self.ny as isize).contains(&m).then_some(m as usize)
    }
}

/// Wavefunction sampled on a grid, stored row-major (`index = j * nx + i`).
#[derive(Clone, Debug, PartialEq)]
pub struct WavePacket2D {
    grid: Grid2D,
    amplitudes: Vec<C64>,
    /// Probability removed by the absorbing layer so far.
    absorbed: f64,
    /// Probability removed by masking at wall cells (only the initial
    /// projection can remove anything).
    wall_loss: f64,
    elapsed: f64,
}

impl WavePacket2D {
    pub fn from_amplitudes(grid: Grid2D, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: amplitudes.len() });
        }
        Ok(WavePacket2D { grid, amplitudes, absorbed: 0.0, wall_loss: 0.0, elapsed: 0.0 })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Vec<C64> {
        &mut self.amplitudes
    }

    pub fn absorbed(&self) -> f64 {
        self.absorbed
    }

    pub fn wall_loss(&self) -> f64 {
        self.wall_loss
    }

    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    pub(crate) fn record(&mut self, absorbed: f64, wall_loss: f64, elapsed: f64) {
        self.absorbed += absorbed;
        self.wall_loss += wall_loss;
        self.elapsed += elapsed;
    }

    /// Discrete `∫ |ψ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    /// `|1 - (∫|ψ|² + absorbed + wall loss)|`: what the stepper failed to
    /// conserve.
    pub fn norm_drift(&self) -> f64 {
        (1.0 - (self.norm_sqr() + self.absorbed + self.wall_loss)).abs()
    }

    /// Discrete `<a, b>` with the cell-area weight.
    pub fn inner(&self, other: &WavePacket2D) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter("packets live on different grids".into()));
        }
        let s: C64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell_area())
    }

    /// `α ψ + β φ` on a shared grid; bookkeeping starts fresh.
    pub fn combine(alpha: C64, a: &WavePacket2D, beta: C64, b: &WavePacket2D) -> Result<Self> {
        if a.grid != b.grid {
            return Err(Error::InvalidParameter("packets live on different grids".into()));
        }
        let amps = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| alpha * x + beta * y).collect();
        Self::from_amplitudes(a.grid, amps)
    }

    pub fn max_abs_diff(&self, other: &WavePacket2D) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `(<x>, <y>)` divided by the current norm.
    pub fn position_expectation(&self) -> (f64, f64) {
        let g = &self.grid;
        let (mut sx, mut sy, mut total) = (0.0, 0.0, 0.0);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let p = self.amplitudes[g.index(i, j)].norm_sqr();
                sx += p * g.x(i);
                sy += p * g.y(j);
                total += p;
            }
        }
        (sx / total, sy / total)
    }

    /// `(<p_x>, <p_y>) = ∫ ψ̄ (ħ/i) ∇ψ`, using fourth-order central
    /// differences; divided by the current norm.
    pub fn momentum_expectation(&self, hbar: f64) -> (f64, f64) {
        let g = &self.grid;
        let psi = |i: isize, j: isize| -> C64 {
            if i < 0 || j < 0 || i >= g.nx as isize || j >= g.ny as isize {
                C64::new(0.0, 0.0)
            } else {
                self.amplitudes[g.index(i as usize, j as usize)]
            }
        };
        let d4 = |m2: C64, m1: C64, p1: C64, p2: C64, h: f64| (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let (mut px, mut py) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                let c = psi(i, j).conj();
                px += c * d4(psi(i - 2, j), psi(i - 1, j), psi(i + 1, j), psi(i + 2, j), g.dx());
                py += c * d4(psi(i, j - 2), psi(i, j - 1), psi(i, j + 1), psi(i, j + 2), g.dy());
            }
        }
        let norm = self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // (ħ/i) ∂ = -iħ ∂
        let factor = C64::new(0.0, -hbar) / norm;
        ((factor * px).re, (factor * py).re)
    }
}

/// Gaussian packet times a plane wave along +x, normalized to one on the
/// grid:
///
/// `u0(x, y) = (π^{1/2} σ)^{-1} exp(i k0 (x - xc) - ((x - xc)² + (y - yc)²) / (2σ²))`
pub fn init_packet(grid: &Grid2D, params: &PhysicalParams, center: (f64, f64)) -> Result<WavePacket2D> {
    params.validate()?;
    let h = grid.dx().max(grid.dy());
    if params.sigma < 4.0 * h {
        return Err(Error::UnresolvableScale(format!(
            "sigma {} is below four grid spacings ({})",
            params.sigma,
            4.0 * h
        )));
    }
    if params.k0 > PI / (2.0 * grid.dx()) {
        return Err(Error::UnresolvableScale(format!(
            "k0 {} exceeds pi / (2 dx) = {}",
            params.k0,
            PI / (2.0 * grid.dx())
        )));
    }
    let (xc, yc) = center;
    let s2 = 2.0 * params.sigma * params.sigma;
    let amp = 1.0 / (PI.sqrt() * params.sigma);
    let mut amplitudes = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        let dy = grid.y(j) - yc;
        for i in 0..grid.nx {
            let dx = grid.x(i) - xc;
            let envelope = amp * (-(dx * dx + dy * dy) / s2).exp();
            amplitudes.push(C64::from_polar(envelope, params.k0 * dx));
        }
    }
    let mut packet = WavePacket2D::from_amplitudes(*grid, amplitudes)?;
    let n = packet.norm_sqr().sqrt();
    if n == 0.0 {
        return Err(Error::UnresolvableScale("packet vanishes on the grid".into()));
    }
    packet.amplitudes.iter_mut().for_each(|z| *z /= n);
    Ok(packet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params() -> PhysicalParams {
        PhysicalParams { hbar: 1.0, mass: 1.0, k0: 3.0, sigma: 1.0, delta: 0.4, b: 5.0 }
    }

    #[test]
    fn grid_geometry() {
        let g = Grid2D::with_spacing(32, 20, 0.5).unwrap();
        assert_eq!(g.y(g.center_row()), 0.0);
        assert_abs_diff_eq!(g.dx(), 0.5);
        assert_eq!(g.mirror_row(g.center_row() + 3), Some(g.center_row() - 3));
        assert_eq!(g.mirror_row(0), None);
        assert!(Grid2D::new(8, 32, 1.0, 1.0).is_err());
        assert!(Grid2D::new(32, 32, -1.0, 1.0).is_err());
    }

    #[test]
    fn packet_is_normalized_and_centred() {
        let g = Grid2D::with_spacing(128, 96, 0.1).unwrap();
        let p = init_packet(&g, &params(), (6.0, 0.3)).unwrap();
        assert_abs_diff_eq!(p.norm_sqr(), 1.0, epsilon = 1e-8);
        let (x, y) = p.position_expectation();
        assert!((x - 6.0).abs() < g.dx());
        assert!((y - 0.3).abs() < g.dy());
    }

    #[test]
    fn packet_momentum_matches_carrier() {
        let g = Grid2D::with_spacing(128, 96, 0.1).unwrap();
        let p = init_packet(&g, &params(), (6.0, 0.0)).unwrap();
        let (px, py) = p.momentum_expectation(1.0);
        assert!((px - 3.0).abs() / 3.0 < 0.02, "px = {px}");
        assert!(py.abs() / 3.0 < 0.02, "py = {py}");
    }

    #[test]
    fn unresolvable_packets_are_rejected() {
        let g = Grid2D::with_spacing(64, 64, 0.5).unwrap();
        assert!(matches!(init_packet(&g, &params(), (16.0, 0.0)), Err(Error::UnresolvableScale(_))));
        let g = Grid2D::with_spacing(128, 96, 0.1).unwrap();
        let fast = PhysicalParams { k0: 20.0, ..params() };
        assert!(matches!(init_packet(&g, &fast, (6.0, 0.0)), Err(Error::UnresolvableScale(_))));
        let bad = PhysicalParams { sigma: -1.0, ..params() };
        assert!(init_packet(&g, &bad, (6.0, 0.0)).is_err());
    }
}
