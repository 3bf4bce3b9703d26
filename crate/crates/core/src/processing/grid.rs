use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::array_model::ArrayConfig;
use crate::error::{invalid, Result};

/// Direction-range lattice. Flattened index `i = i_rng · P_dir + i_dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRangeGrid {
    directions: Vec<f64>,
    ranges: Vec<f64>,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl DirectionRangeGrid {
    pub fn new(directions: Vec<f64>, ranges: Vec<f64>) -> Result<Self> {
        if directions.is_empty() || ranges.is_empty() {
            return Err(invalid("grid", "both axes need at least one point"));
        }
        if !strictly_increasing(&directions) || !strictly_increasing(&ranges) {
            return Err(invalid("grid", "axes must be strictly increasing"));
        }
        if let Some(t) = directions.iter().find(|t| !(t.abs() < PI / 2.0)) {
            return Err(invalid("grid", format!("direction {t} rad outside (−π/2, π/2)")));
        }
        if let Some(r) = ranges.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(invalid("grid", format!("range {r} m is negative or non-finite")));
        }
        Ok(Self { directions, ranges })
    }

    /// Lattice on which every mutual offset has `D_N(q) ∈ {0, ±N}` and
    /// `Φ(p) ∈ {0, ±1}` for an `M`-level discrete uniform draw.
    ///
    /// Direction sines sit at multiples of `c / (2 f_c d N)`, folded into the
    /// principal period and restricted to the visible region; ranges are
    /// `c i / (2 M Δf)` for `i = 0..M`.
    pub fn canonical(cfg: &ArrayConfig, m_levels: usize) -> Result<Self> {
        if m_levels == 0 {
            return Err(invalid("m_levels", "must be at least 1"));
        }
        let n = cfg.n_elements();
        let period = cfg.wave_speed() / (2.0 * cfg.center_freq() * cfg.spacing());
        let mut sines: Vec<f64> = (0..n)
            .map(|k| {
                let u = period * k as f64 / n as f64;
                if u >= period / 2.0 {
                    u - period
                } else {
                    u
                }
            })
            .filter(|u| u.abs() < 1.0 - 1e-12)
            .collect();
        sines.sort_by(f64::total_cmp);
        let directions = sines.into_iter().map(f64::asin).collect();
        let cell = cfg.wave_speed() / (2.0 * m_levels as f64 * cfg.freq_increment());
        let ranges = (0..m_levels).map(|i| cell * i as f64).collect();
        Self::new(directions, ranges)
    }

    pub fn directions(&self) -> &[f64] {
        &self.directions
    }

    pub fn ranges(&self) -> &[f64] {
        &self.ranges
    }

    pub fn n_directions(&self) -> usize {
        self.directions.len()
    }

    pub fn n_ranges(&self) -> usize {
        self.ranges.len()
    }

    pub fn len(&self) -> usize {
        self.directions.len() * self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i_dir: usize, i_rng: usize) -> usize {
        i_rng * self.directions.len() + i_dir
    }

    /// `(i_dir, i_rng)` of a flattened index.
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i % self.directions.len(), i / self.directions.len())
    }

    /// `(θ, r)` of a flattened index.
    pub fn point(&self, i: usize) -> (f64, f64) {
        let (d, r) = self.split(i);
        (self.directions[d], self.ranges[r])
    }

    /// Flattened index of the lattice point closest to `(θ, r)`, measured
    /// per axis in direction sine and in range.
    pub fn nearest(&self, theta: f64, r: f64) -> usize {
        let s = theta.sin();
        let i_dir = argmin(self.directions.iter().map(|t| (t.sin() - s).abs()));
        let i_rng = argmin(self.ranges.iter().map(|x| (x - r).abs()));
        self.index(i_dir, i_rng)
    }

    /// DFT bin (mod `N`) of each direction, for canonical lattices.
    pub fn direction_bins(&self, cfg: &ArrayConfig) -> Vec<usize> {
        let n = cfg.n_elements() as i64;
        self.directions
            .iter()
            .map(|&t| {
                let q = cfg.direction_offset(t, 0.0);
                ((q * n as f64).round() as i64).rem_euclid(n) as usize
            })
            .collect()
    }

    /// DFT bin (mod `M`) of each range, for canonical lattices.
    pub fn range_bins(&self, cfg: &ArrayConfig, m_levels: usize) -> Vec<usize> {
        let m = m_levels as i64;
        self.ranges
            .iter()
            .map(|&r| {
                let p = cfg.range_offset(r, 0.0);
                ((p * m as f64).round() as i64).rem_euclid(m) as usize
            })
            .collect()
    }
}

fn argmin(it: impl Iterator<Item = f64>) -> usize {
    it.enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_grid_shape() {
        let cfg = ArrayConfig::s_band(128).unwrap();
        let g = DirectionRangeGrid::canonical(&cfg, 64).unwrap();
        // d is a hair above λ/4, so all N direction cells are visible
        assert_eq!(g.n_directions(), 128);
        assert_eq!(g.n_ranges(), 64);
        assert!((g.ranges()[1] - cfg.wave_speed() / (2.0 * 64.0 * 1e6)).abs() < 1e-12);
        let bins = g.direction_bins(&cfg);
        let mut sorted = bins.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 128);
        let rb = g.range_bins(&cfg, 64);
        assert_eq!(rb, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn exact_quarter_wave_drops_endfire() {
        let cfg = ArrayConfig::with_wave_speed(16, 0.025, 3e9, 1e6, 3e8).unwrap();
        let g = DirectionRangeGrid::canonical(&cfg, 8).unwrap();
        assert_eq!(g.n_directions(), 15);
    }

    #[test]
    fn indexing_round_trips() {
        let g = DirectionRangeGrid::new(vec![-0.5, 0.0, 0.4], vec![0.0, 10.0]).unwrap();
        assert_eq!(g.len(), 6);
        for i in 0..6 {
            let (d, r) = g.split(i);
            assert_eq!(g.index(d, r), i);
        }
        assert_eq!(g.point(4), (0.0, 10.0));
        assert_eq!(g.nearest(0.38, 9.0), g.index(2, 1));
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(DirectionRangeGrid::new(vec![0.1, 0.1], vec![0.0]).is_err());
        assert!(DirectionRangeGrid::new(vec![0.1], vec![]).is_err());
        assert!(DirectionRangeGrid::new(vec![1.6], vec![0.0]).is_err());
        assert!(DirectionRangeGrid::new(vec![0.0], vec![-1.0]).is_err());
    }
}
