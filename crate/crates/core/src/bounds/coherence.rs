use num_complex::Complex64;

use crate::array_model::{ArrayConfig, FrequencyDraw};
use crate::error::{invalid, Result, RfdaError};
use crate::processing::{zero_padding_2dfft, DirectionRangeGrid, ObservingMatrix};

/// Largest normalized inner product between two distinct dictionary columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    /// Column pair attaining `mu`.
    pub pair: (usize, usize),
}

const BLOCK: usize = 256;

/// Brute force over all column pairs.
pub fn mutual_coherence(obs: &ObservingMatrix) -> Result<CoherenceReport> {
    let a = &obs.columns;
    let k = a.ncols();
    if k < 2 {
        return Err(invalid("observing matrix", "need at least two columns"));
    }
    let norms = obs.column_norms();
    let mut best = CoherenceReport { mu: 0.0, pair: (0, 1) };
    for start in (0..k).step_by(BLOCK) {
        let width = BLOCK.min(k - start);
        let g = a.columns(start, width).ad_mul(a);
        for bi in 0..width {
            let i = start + bi;
            for h in i + 1..k {
                let v = g[(bi, h)].norm() / (norms[i] * norms[h]);
                if v > best.mu {
                    best = CoherenceReport { mu: v, pair: (i, h) };
                }
            }
        }
    }
    best.mu = best.mu.min(1.0);
    Ok(best)
}

/// Coherence of the canonical `M`-level dictionary from one 2D DFT.
///
/// Column inner products on the canonical lattice depend only on the
/// (direction bin, range cell) offset, and are the DFT of the filled
/// indicator matrix at that offset. Falls back to the brute-force search if
/// some direction bins lie outside the visible region.
pub fn canonical_coherence(cfg: &ArrayConfig, draw: &FrequencyDraw, m_levels: usize) -> Result<CoherenceReport> {
    let grid = DirectionRangeGrid::canonical(cfg, m_levels)?;
    let n = cfg.n_elements();
    if grid.n_directions() < n {
        let obs = crate::processing::build_observing_matrix(cfg, draw, &grid)?;
        return mutual_coherence(&obs);
    }
    if grid.len() < 2 {
        return Err(invalid("observing matrix", "need at least two columns"));
    }
    let spectrum = zero_padding_2dfft(&vec![Complex64::new(1.0, 0.0); n], draw, m_levels, (1, 1))?;
    let mut best = (0.0, 0, 0);
    for k in 0..n {
        for i in 0..m_levels {
            if (i, k) == (0, 0) {
                continue;
            }
            let v = spectrum[(i, k)].norm() / n as f64;
            if v > best.0 {
                best = (v, i, k);
            }
        }
    }
    let dir_bins = grid.direction_bins(cfg);
    let pos = |bin: usize| dir_bins.iter().position(|&b| b == bin).expect("all bins present");
    let a = grid.index(pos(0), 0);
    let b = grid.index(pos(best.2), best.1);
    Ok(CoherenceReport {
        mu: best.0.min(1.0),
        pair: (a.min(b), a.max(b)),
    })
}

/// Lower bound `1 − (M−1) N e^{−N r²}` on `Pr{μ < r}`, clamped to `[0, 1]`.
pub fn coherence_prob_bound(m_levels: usize, n: usize, r: f64) -> f64 {
    let fail = (m_levels as f64 - 1.0) * n as f64 * (-(n as f64) * r * r).exp();
    (1.0 - fail).clamp(0.0, 1.0)
}

/// Largest `K` with `K ≤ ½(1 + √(N / (ln(MN − N) − ln ε)))`.
pub fn exact_recovery_sparsity(m_levels: usize, n: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    if m_levels < 2 || n == 0 {
        return Err(invalid("m_levels", "need M ≥ 2 and N ≥ 1"));
    }
    let nf = n as f64;
    let denom = ((m_levels as f64 - 1.0) * nf).ln() - epsilon.ln();
    Ok((0.5 * (1.0 + (nf / denom).sqrt())).floor() as usize)
}

/// QCBP reconstruction error bound `√(3(1+η)) / (1 − (2K−1)η) · (σ_l + σ_n)`.
pub fn qcbp_error_bound(
    k: usize,
    m_levels: usize,
    n: usize,
    epsilon: f64,
    sigma_l: f64,
    sigma_n: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    if m_levels < 2 || n == 0 || k == 0 {
        return Err(invalid("qcbp", "need K ≥ 1, M ≥ 2 and N ≥ 1"));
    }
    if !(sigma_l >= 0.0 && sigma_n >= 0.0) {
        return Err(invalid("sigma", "tolerances must be non-negative"));
    }
    let nf = n as f64;
    let eta = ((nf.ln() + (m_levels as f64 - 1.0).ln() - epsilon.ln()) / nf).sqrt();
    let slack = 1.0 - (2 * k - 1) as f64 * eta;
    if slack <= 0.0 {
        return Err(RfdaError::BoundInapplicable(format!(
            "(2K−1)η = {:.4} ≥ 1 for K = {k}",
            (2 * k - 1) as f64 * eta
        )));
    }
    Ok((3.0 * (1.0 + eta)).sqrt() / slack * (sigma_l + sigma_n))
}
