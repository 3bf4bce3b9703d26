use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::array_model::{steering_vector_unchecked, ArrayConfig, BasebandModel, EchoMatrix};
use crate::error::{Result, RfdaError};
use crate::processing::{matched_filter, ObservingMatrix};

const THETA_TOL: f64 = 1e-6;
const RANGE_TOL: f64 = 1e-4;
const MAX_PASSES: usize = 20;
const CANDIDATES: usize = 8;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlEstimate {
    pub direction: f64,
    pub range: f64,
    /// `Σ_l |⟨b(θ̂, r̂), r(l)⟩|²` at the estimate.
    pub objective: f64,
    /// Coordinate refinement passes performed.
    pub passes: usize,
    /// False when the refinement stopped on the pass limit.
    pub converged: bool,
}

/// Single-target ML estimate: coarse scan over the dictionary grid, then
/// alternating golden-section refinement in direction and range around the
/// strongest few coarse cells.
pub fn ml_estimate(cfg: &ArrayConfig, obs: &ObservingMatrix, echo: &EchoMatrix) -> Result<MlEstimate> {
    if cfg.n_elements() != obs.n_rows() {
        return Err(RfdaError::DimensionMismatch(format!(
            "array has {} elements but the observing matrix has {} rows",
            cfg.n_elements(),
            obs.n_rows()
        )));
    }
    let mf = matched_filter(echo, obs)?;
    let offsets = obs.draw.offsets();
    let samples = &echo.samples;
    let objective = |t: f64, x: f64| -> f64 {
        let b = steering_vector_unchecked(cfg, offsets, t, x, BasebandModel::Approximate);
        power(&b, samples)
    };
    let mut best: Option<MlEstimate> = None;
    for cell in candidates(obs, &mf) {
        let est = refine(obs, cell, &objective);
        if best.is_none_or(|b| est.objective > b.objective) {
            best = Some(est);
        }
    }
    Ok(best.expect("grid is never empty"))
}

/// Up to `CANDIDATES` strongest coarse cells, no two of them adjacent.
fn candidates(obs: &ObservingMatrix, mf: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..mf.len()).collect();
    order.sort_by(|&a, &b| mf[b].total_cmp(&mf[a]).then(a.cmp(&b)));
    let mut picked: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();
    for i in order {
        let (d, r) = obs.grid.split(i);
        if picked.iter().all(|&(pd, pr)| d.abs_diff(pd) > 1 || r.abs_diff(pr) > 1) {
            picked.push((d, r));
            out.push(i);
            if out.len() == CANDIDATES {
                break;
            }
        }
    }
    out
}

/// Alternating golden-section refinement within the cells around `best`.
fn refine(obs: &ObservingMatrix, best: usize, objective: &impl Fn(f64, f64) -> f64) -> MlEstimate {
    let grid = &obs.grid;
    let (i_dir, i_rng) = grid.split(best);
    let dirs = grid.directions();
    let rngs = grid.ranges();
    let (mut theta, mut r) = grid.point(best);

    let half_pi = std::f64::consts::FRAC_PI_2 - 1e-9;
    let dir_step = if dirs.len() > 1 { (dirs[1] - dirs[0]).abs().max(1e-3) } else { 0.05 };
    let theta_lo = if i_dir > 0 { dirs[i_dir - 1] } else { (theta - dir_step).max(-half_pi) };
    let theta_hi = if i_dir + 1 < dirs.len() { dirs[i_dir + 1] } else { (theta + dir_step).min(half_pi) };
    let rng_step = if rngs.len() > 1 { rngs[1] - rngs[0] } else { 1.0 };
    let r_lo = if i_rng > 0 { rngs[i_rng - 1] } else { (r - rng_step).max(0.0) };
    let r_hi = if i_rng + 1 < rngs.len() { rngs[i_rng + 1] } else { r + rng_step };

    let mut passes = 0;
    let mut converged = false;
    while passes < MAX_PASSES {
        passes += 1;
        let t_new = golden_max(|t| objective(t, r), theta_lo, theta_hi, THETA_TOL);
        let r_new = golden_max(|x| objective(t_new, x), r_lo, r_hi, RANGE_TOL);
        let moved = (t_new - theta).abs() > THETA_TOL || (r_new - r).abs() > RANGE_TOL;
        theta = t_new;
        r = r_new;
        if !moved {
            converged = true;
            break;
        }
    }
    MlEstimate {
        direction: theta,
        range: r,
        objective: objective(theta, r),
        passes,
        converged,
    }
}

fn power(b: &nalgebra::DVector<Complex64>, samples: &DMatrix<Complex64>) -> f64 {
    samples.column_iter().map(|col| b.dotc(&col).norm_sqr()).sum()
}

/// Maximizer of a unimodal `f` on `[a, b]` to within `tol`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{sample_frequencies, synthesize_echoes, FrequencyDistribution, TargetScene};
    use crate::processing::{build_observing_matrix, DirectionRangeGrid};

    fn setup(n: usize, m: usize) -> (ArrayConfig, ObservingMatrix) {
        let cfg = ArrayConfig::s_band(n).unwrap();
        let draw = sample_frequencies(&FrequencyDistribution::discrete_uniform(m).unwrap(), n, 4).unwrap();
        let grid = DirectionRangeGrid::canonical(&cfg, m).unwrap();
        let obs = build_observing_matrix(&cfg, &draw, &grid).unwrap();
        (cfg, obs)
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let x = golden_max(|x| -(x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn noiseless_on_grid_target_is_exact() {
        let (cfg, obs) = setup(32, 16);
        let (theta, r) = obs.grid.point(obs.grid.index(9, 5));
        let scene = TargetScene::steady(&[(theta, r, Complex64::new(1.0, 0.5))], 1).unwrap();
        let echo = synthesize_echoes(&cfg, &obs.draw, &scene, 0.0, 0).unwrap();
        let est = ml_estimate(&cfg, &obs, &echo).unwrap();
        assert!((est.direction - theta).abs() < THETA_TOL);
        assert!((est.range - r).abs() < RANGE_TOL);
        assert!(est.converged);
    }

    #[test]
    fn noiseless_off_grid_target_is_refined() {
        let (cfg, obs) = setup(32, 16);
        let (theta, r) = (0.2345, 61.7);
        let scene = TargetScene::steady(&[(theta, r, Complex64::new(1.0, 0.0))], 2).unwrap();
        let echo = synthesize_echoes(&cfg, &obs.draw, &scene, 0.0, 0).unwrap();
        let est = ml_estimate(&cfg, &obs, &echo).unwrap();
        assert!((est.direction - theta).abs() < 1e-5, "{}", est.direction);
        assert!((est.range - r).abs() < 1e-3, "{}", est.range);
    }
}
