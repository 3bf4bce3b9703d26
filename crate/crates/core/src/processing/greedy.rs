//! Subspace pursuit for single and multiple measurement vectors.
//!
//! SP is GSP with one snapshot: correlations are scored by their l₂ norm
//! across snapshots, and every least-squares fit is joint over snapshots.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{check_rows, least_squares, residual, single_column, ObservingMatrix, RecoveryResult};
use crate::error::{invalid, Result};

const MAX_ITER: usize = 100;

pub fn sp_recover(obs: &ObservingMatrix, echo: &DVector<Complex64>, k: usize) -> Result<RecoveryResult> {
    gsp_recover(obs, &single_column(echo), k)
}

pub fn gsp_recover(obs: &ObservingMatrix, r: &DMatrix<Complex64>, k: usize) -> Result<RecoveryResult> {
    check_rows(obs, r)?;
    let n = obs.n_rows();
    if k == 0 || k >= n {
        return Err(invalid("k", format!("sparsity must satisfy 1 ≤ K < N = {n}, got {k}")));
    }
    if 2 * k > obs.n_columns() {
        return Err(invalid("k", format!("2K exceeds the {} dictionary columns", obs.n_columns())));
    }
    let a = &obs.columns;
    let norms = obs.column_norms();

    let mut support = top_k(&correlation_scores(obs, &norms, r), k);
    support.sort_unstable();
    let mut x = least_squares(a, &support, r);
    let mut res_norm = residual(a, &support, &x, r).norm();
    let mut history = vec![res_norm];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITER {
        iterations += 1;
        let res = residual(a, &support, &x, r);
        let mut candidates = support.clone();
        let mut extra = top_k(&correlation_scores(obs, &norms, &res), candidates.len() + k);
        extra.retain(|i| !candidates.contains(i));
        candidates.extend(extra.into_iter().take(k));
        candidates.sort_unstable();

        let xc = least_squares(a, &candidates, r);
        let weights: Vec<f64> = candidates
            .iter()
            .enumerate()
            .map(|(row, &i)| xc.row(row).norm() * norms[i])
            .collect();
        let mut next: Vec<usize> = top_k(&weights, k).into_iter().map(|j| candidates[j]).collect();
        next.sort_unstable();
        let x_next = least_squares(a, &next, r);
        let next_norm = residual(a, &next, &x_next, r).norm();
        if next_norm >= res_norm {
            converged = true;
            break;
        }
        support = next;
        x = x_next;
        res_norm = next_norm;
        history.push(res_norm);
    }

    Ok(RecoveryResult {
        support,
        amplitudes: x,
        residual_norm: res_norm,
        iterations,
        converged,
        residual_history: history,
    })
}

/// `‖(Aᴴ R)_i‖₂ / ‖a_i‖` for every column `i`.
fn correlation_scores(obs: &ObservingMatrix, norms: &[f64], r: &DMatrix<Complex64>) -> Vec<f64> {
    let g = obs.correlate(r);
    g.row_iter()
        .zip(norms)
        .map(|(row, &nrm)| if nrm > 0.0 { row.norm() / nrm } else { 0.0 })
        .collect()
}

/// Indices of the `k` largest scores; ties go to the smaller index.
fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    idx.truncate(k);
    idx
}
