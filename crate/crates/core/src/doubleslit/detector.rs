use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::grid::WavePacket2D;
use crate::error::{Error, Result};
use crate::measurement::{Outcome, Pmf};

/// Screen at `x = b` cut into strips of height `delta`.
///
/// Bin 0 is everything with `x < b`. For `n > 0`, `D_n` is
/// `delta (n - 1) < y <= delta n`; for `n < 0`, `delta n < y <= delta (n + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectorBinning {
    pub b: f64,
    pub delta: f64,
}

impl DetectorBinning {
    pub fn new(b: f64, delta: f64) -> Result<Self> {
        if !(b.is_finite() && delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid binning b = {b}, delta = {delta}")));
        }
        Ok(DetectorBinning { b, delta })
    }

    pub fn bin(&self, x: f64, y: f64) -> i64 {
        if x < self.b {
            return 0;
        }
        // strip edges belong to the bin below them; the offset absorbs roundoff
        let n = (y / self.delta - 1e-9).ceil() as i64;
        if y > 0.0 {
            n.max(1)
        } else {
            n - 1
        }
    }
}

fn binned_mass(packet: &WavePacket2D, binning: &DetectorBinning) -> BTreeMap<i64, f64> {
    let g = packet.grid();
    let area = g.cell_area();
    let mut bins = BTreeMap::new();
    for j in 0..g.ny {
        let y = g.y(j);
        for i in 0..g.nx {
            let p = packet.amplitudes()[g.index(i, j)].norm_sqr() * area;
            *bins.entry(binning.bin(g.x(i), y)).or_insert(0.0) += p;
        }
    }
    bins
}

/// Probability of each detector bin that intersects the grid, in ascending
/// bin order. Mass removed by the absorber or by the initial wall projection
/// is reported as no-detection.
pub fn detector_pmf(packet: &WavePacket2D, binning: &DetectorBinning) -> Result<Pmf> {
    let bins = binned_mass(packet, binning);
    let total: f64 = bins.values().sum();
    let entries = bins.into_iter().map(|(n, p)| (Outcome::int(n), p)).collect();
    Pmf::from_raw(entries, total)
}

/// Bin index of each pmf entry, skipping labels that are not single integers.
pub fn bin_probabilities(pmf: &Pmf) -> BTreeMap<i64, f64> {
    pmf.entries()
        .iter()
        .filter_map(|(o, p)| match o.atoms() {
            [crate::measurement::Atom::Int(n)] => Some((*n, *p)),
            _ => None,
        })
        .collect()
}

/// `(max - min) / (max + min)` of the bin probabilities in `window`, with
/// bin 0 excluded. Each probability is first averaged with its `smoothing`
/// neighbours on either side (within the window). Bins missing from the pmf
/// count as zero.
pub fn fringe_visibility(pmf: &Pmf, window: RangeInclusive<i64>, smoothing: usize) -> Result<f64> {
    let probs = bin_probabilities(pmf);
    let bins: Vec<i64> = window.filter(|n| *n != 0).collect();
    if bins.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let values: Vec<f64> = bins.iter().map(|n| probs.get(n).copied().unwrap_or(0.0)).collect();
    let smoothed: Vec<f64> = (0..values.len())
        .map(|k| {
            let lo = k.saturating_sub(smoothing);
            let hi = (k + smoothing).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let max = smoothed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = smoothed.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / (max + min))
}

/// Detected probability split by screen half.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WhichWayMass {
    /// Total over bins `n > 0`.
    pub upper: f64,
    /// Total over bins `n < 0`.
    pub lower: f64,
    /// Bin 0.
    pub remainder: f64,
}

pub fn which_way_mass(packet: &WavePacket2D, binning: &DetectorBinning) -> WhichWayMass {
    let bins = binned_mass(packet, binning);
    WhichWayMass {
        upper: bins.range(1..).map(|(_, p)| p).sum(),
        lower: bins.range(..0).map(|(_, p)| p).sum(),
        remainder: bins.get(&0).copied().unwrap_or(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doubleslit::grid::Grid2D;
    use crate::kernel::C64;
    use approx::assert_abs_diff_eq;

    fn pmf(pairs: &[(i64, f64)]) -> Pmf {
        Pmf::from_probabilities(pairs.iter().map(|(n, p)| (Outcome::int(*n), *p)).collect()).unwrap()
    }

    #[test]
    fn bin_edges() {
        let d = DetectorBinning::new(2.0, 0.5).unwrap();
        assert_eq!(d.bin(1.9, 0.3), 0);
        assert_eq!(d.bin(2.0, 0.3), 1);
        assert_eq!(d.bin(2.5, 0.5), 1);
        assert_eq!(d.bin(2.5, 0.50001), 2);
        assert_eq!(d.bin(2.5, 0.0), -1);
        assert_eq!(d.bin(2.5, -0.5), -2);
        assert_eq!(d.bin(2.5, -0.49), -1);
        assert_eq!(d.bin(2.5, -0.51), -2);
        assert_eq!(d.bin(2.5, -1.0), -3);
    }

    #[test]
    fn visibility_examples() {
        let p = pmf(&[(1, 0.25), (2, 0.25), (3, 0.25), (4, 0.25)]);
        assert_abs_diff_eq!(fringe_visibility(&p, 1..=4, 0).unwrap(), 0.0);
        let p = pmf(&[(1, 0.5), (2, 0.0), (3, 0.5), (4, 0.0)]);
        assert_abs_diff_eq!(fringe_visibility(&p, 1..=4, 0).unwrap(), 1.0);
        assert!(fringe_visibility(&p, 1..=4, 1).unwrap() < 1.0);
        assert!(matches!(fringe_visibility(&p, 0..=0, 0), Err(Error::EmptyWindow)));
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 3..=1;
        assert!(matches!(fringe_visibility(&p, empty, 0), Err(Error::EmptyWindow)));
    }

    #[test]
    fn pmf_and_which_way_agree() {
        let g = Grid2D::with_spacing(32, 32, 0.25).unwrap();
        let amps: Vec<C64> = (0..g.len()).map(|k| C64::new((k % 7) as f64, (k % 3) as f64)).collect();
        let mut packet = WavePacket2D::from_amplitudes(g, amps).unwrap();
        let n = packet.norm_sqr().sqrt();
        let amps: Vec<C64> = packet.amplitudes().iter().map(|z| z / n).collect();
        packet = WavePacket2D::from_amplitudes(g, amps).unwrap();
        let d = DetectorBinning::new(4.0, 0.5).unwrap();
        let pmf = detector_pmf(&packet, &d).unwrap();
        assert_abs_diff_eq!(pmf.detected_mass(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pmf.no_detection(), 0.0, epsilon = 1e-12);
        let w = which_way_mass(&packet, &d);
        assert_abs_diff_eq!(w.upper + w.lower + w.remainder, 1.0, epsilon = 1e-12);
        let probs = bin_probabilities(&pmf);
        assert_abs_diff_eq!(probs.range(1..).map(|(_, p)| p).sum::<f64>(), w.upper, epsilon = 1e-12);
        assert!(probs.keys().zip(probs.keys().skip(1)).all(|(a, b)| a < b));
    }
}
