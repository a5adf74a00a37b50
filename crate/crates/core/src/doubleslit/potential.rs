use std::fmt;

use serde::Serialize;

use super::grid::{Grid2D, PhysicalParams, WavePacket2D};
use crate::error::{Error, Result};
use crate::kernel::C64;

/// Which apparatus the packet meets beyond the slit plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// Open screen region: interference.
    One,
    /// A wall along `y = 0` from the slit plane onward: which-way.
    Two,
}

impl Branch {
    pub fn number(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Quadratic absorbing layer along all four edges of the box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Absorber {
    pub width: f64,
    /// Damping rate at the outermost cell.
    pub strength: f64,
}

/// Hard-wall layout. All walls are infinite potential barriers.
///
/// A wedge with apex `(apex_x, 0)` behind the source opens toward the slit
/// plane `x = slit_x`, meeting it at `y = ±wedge_half_width`. The slit plane
/// is walled across the wedge mouth except for hole A centred at
/// `+hole_center` and hole B centred at `-hole_center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlitGeometry {
    pub apex_x: f64,
    pub slit_x: f64,
    pub wedge_half_width: f64,
    pub hole_center: f64,
    pub hole_half_width: f64,
    pub wall_thickness: f64,
    /// Tip of an optional inner wedge splitting the flow between the holes.
    pub splitter_tip_x: Option<f64>,
    /// End of the branch-2 separator; `None` runs it to the box edge.
    pub separator_end_x: Option<f64>,
    pub block_upper: bool,
    pub block_lower: bool,
    pub absorber: Option<Absorber>,
}

impl SlitGeometry {
    /// Point `a`, where the separator meets the slit plane.
    pub fn point_a(&self) -> (f64, f64) {
        (self.slit_x, 0.0)
    }

    pub fn with_blocked(self, upper: bool, lower: bool) -> Self {
        SlitGeometry { block_upper: upper, block_lower: lower, ..self }
    }

    fn validate(&self, grid: &Grid2D, params: &PhysicalParams) -> Result<()> {
        let out = |msg: String| Err(Error::GeometryOutOfDomain(msg));
        let margin = self.absorber.map_or(0.0, |a| a.width);
        let values = [
            self.apex_x,
            self.slit_x,
            self.wedge_half_width,
            self.hole_center,
            self.hole_half_width,
            self.wall_thickness,
        ];
        if values.iter().any(|v| !v.is_finite()) || self.hole_half_width <= 0.0 || self.wall_thickness <= 0.0 {
            return out("geometry values must be finite and positive".into());
        }
        if let Some(a) = self.absorber {
            if !(a.width >= 0.0 && a.strength >= 0.0 && a.width.is_finite() && a.strength.is_finite()) {
                return Err(Error::InvalidParameter("absorber width and strength must be non-negative".into()));
            }
        }
        if self.apex_x < margin || self.apex_x >= self.slit_x {
            return out(format!("apex {} must lie in [{margin}, slit {})", self.apex_x, self.slit_x));
        }
        if params.b <= self.slit_x || params.b >= grid.x_max() - margin {
            return out(format!(
                "screen b = {} must lie between the slit plane {} and {}",
                params.b,
                self.slit_x,
                grid.x_max() - margin
            ));
        }
        let y_room = grid.y_max().min(-grid.y_min()) - margin;
        if self.wedge_half_width > y_room {
            return out(format!("wedge half-width {} exceeds {y_room}", self.wedge_half_width));
        }
        let inner = self.hole_center - self.hole_half_width;
        let outer = self.hole_center + self.hole_half_width;
        if inner <= 0.5 * self.wall_thickness || outer >= self.wedge_half_width {
            return out(format!("holes [{inner}, {outer}] must fit inside the wedge mouth"));
        }
        if let Some(tip) = self.splitter_tip_x {
            if !(tip > self.apex_x && tip < self.slit_x) {
                return out(format!("splitter tip {tip} must lie between apex and slit plane"));
            }
        }
        if let Some(end) = self.separator_end_x {
            if !(end > self.slit_x && end <= grid.x_max()) {
                return out(format!("separator end {end} must lie beyond the slit plane"));
            }
        }
        Ok(())
    }
}

/// Wall mask, absorber profile and the Hamiltonian constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential2D {
    grid: Grid2D,
    branch: Option<Branch>,
    blocked: Vec<bool>,
    damping: Vec<f64>,
    hbar: f64,
    mass: f64,
}

impl Potential2D {
    /// `V ≡ 0` in the box, optionally with an absorbing layer.
    pub fn free(grid: &Grid2D, hbar: f64, mass: f64, absorber: Option<Absorber>) -> Self {
        Potential2D {
            grid: *grid,
            branch: None,
            blocked: vec![false; grid.len()],
            damping: damping_profile(grid, absorber),
            hbar,
            mass,
        }
    }

    /// Arbitrary wall mask, for tests and custom apparatus.
    pub fn from_mask(
        grid: &Grid2D,
        blocked: Vec<bool>,
        hbar: f64,
        mass: f64,
        absorber: Option<Absorber>,
    ) -> Result<Self> {
        if blocked.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: blocked.len() });
        }
        Ok(Potential2D { grid: *grid, branch: None, blocked, damping: damping_profile(grid, absorber), hbar, mass })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn branch(&self) -> Option<Branch> {
        self.branch
    }

    pub fn blocked(&self) -> &[bool] {
        &self.blocked
    }

    pub fn is_blocked(&self, i: usize, j: usize) -> bool {
        self.blocked[self.grid.index(i, j)]
    }

    /// Zeroes wall cells, booking the removed probability as wall loss.
    pub fn apply_mask(&self, packet: &mut WavePacket2D) {
        let area = packet.grid().cell_area();
        let mut lost = 0.0;
        for (z, blocked) in packet.amplitudes_mut().iter_mut().zip(&self.blocked) {
            if *blocked {
                lost += z.norm_sqr();
                *z = C64::new(0.0, 0.0);
            }
        }
        packet.record(0.0, lost * area, 0.0);
    }

    /// Per-cell damping rate of the absorbing layer (zero in the interior).
    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// True when every blocked cell's mirror image through `y = 0` is blocked.
    pub fn is_mirror_symmetric(&self) -> bool {
        let g = &self.grid;
        (0..g.ny).all(|j| match g.mirror_row(j) {
            Some(m) => (0..g.nx).all(|i| self.is_blocked(i, j) == self.is_blocked(i, m)),
            None => true,
        })
    }
}

fn damping_profile(grid: &Grid2D, absorber: Option<Absorber>) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    let Some(a) = absorber else { return out };
    if a.width <= 0.0 || a.strength <= 0.0 {
        return out;
    }
    let (x0, x1, y0, y1) = (0.0, grid.x_max(), grid.y_min(), grid.y_max());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = (grid.x(i), grid.y(j));
            let edge = (x - x0).min(x1 - x).min(y - y0).min(y1 - y);
            if edge < a.width {
                let s = (a.width - edge) / a.width;
                out[grid.index(i, j)] = a.strength * s * s;
            }
        }
    }
    out
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (px, py) = (p.0 - a.0, p.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { ((px * dx + py * dy) / len2).clamp(0.0, 1.0) };
    let (ex, ey) = (px - t * dx, py - t * dy);
    (ex * ex + ey * ey).sqrt()
}

/// Cells on the branch-2 separator from point `a` along `y = 0`.
pub fn separator_mask(grid: &Grid2D, geometry: &SlitGeometry) -> Vec<bool> {
    let half = 0.5 * geometry.wall_thickness + 1e-9;
    let end = geometry.separator_end_x.unwrap_or(f64::INFINITY);
    let mut mask = vec![false; grid.len()];
    for j in 0..grid.ny {
        if grid.y(j).abs() > half {
            continue;
        }
        for i in 0..grid.nx {
            let x = grid.x(i);
            if x >= geometry.slit_x - half && x <= end + half {
                mask[grid.index(i, j)] = true;
            }
        }
    }
    mask
}

/// Walls shared by both branches: wedge, slit plane, optional splitter and
/// the unpaired edge row of an even-height grid.
fn apparatus_mask(grid: &Grid2D, geometry: &SlitGeometry) -> Vec<bool> {
    let g = geometry;
    let half = 0.5 * g.wall_thickness + 1e-9;
    let apex = (g.apex_x, 0.0);
    let upper_mouth = (g.slit_x, g.wedge_half_width);
    let lower_mouth = (g.slit_x, -g.wedge_half_width);
    let inner = g.hole_center - g.hole_half_width;
    let outer = g.hole_center + g.hole_half_width;
    let mut mask = vec![false; grid.len()];
    for j in 0..grid.ny {
        let y = grid.y(j);
        for i in 0..grid.nx {
            let x = grid.x(i);
            let p = (x, y);
            let mut wall =
                segment_distance(p, apex, upper_mouth) <= half || segment_distance(p, apex, lower_mouth) <= half;
            if (x - g.slit_x).abs() <= half && y.abs() <= g.wedge_half_width + half {
                let in_hole = y.abs() > inner && y.abs() < outer;
                let hole_blocked = if y > 0.0 { g.block_upper } else { g.block_lower };
                wall |= !in_hole || hole_blocked;
            }
            if let Some(tip) = g.splitter_tip_x {
                // filled triangle between the tip and the inner hole edges
                if x >= tip && x <= g.slit_x {
                    let reach = inner * (x - tip) / (g.slit_x - tip);
                    wall |= y.abs() <= reach + half;
                }
            }
            mask[grid.index(i, j)] = wall;
        }
    }
    if grid.mirror_row(0).is_none() {
        (0..grid.nx).for_each(|i| mask[grid.index(i, 0)] = true);
    }
    mask
}

/// Wall mask for one branch. Branch 2 equals branch 1 plus the separator.
pub fn build_potential(
    grid: &Grid2D,
    params: &PhysicalParams,
    branch: Branch,
    geometry: &SlitGeometry,
) -> Result<Potential2D> {
    params.validate()?;
    geometry.validate(grid, params)?;
    let mut blocked = apparatus_mask(grid, geometry);
    if branch == Branch::Two {
        for (b, s) in blocked.iter_mut().zip(separator_mask(grid, geometry)) {
            *b |= s;
        }
    }
    Ok(Potential2D {
        grid: *grid,
        branch: Some(branch),
        blocked,
        damping: damping_profile(grid, geometry.absorber),
        hbar: params.hbar,
        mass: params.mass,
    })
}
