//! Target indication: observing matrices, matched filtering (direct and via a
//! zero-padded 2D DFT) and SMV/MMV sparse recovery.

mod fast;
mod focuss;
mod grid;
mod greedy;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::array_model::{steering_vector_unchecked, ArrayConfig, BasebandModel, EchoMatrix, FrequencyDraw};
use crate::error::{invalid, Result, RfdaError};
use fast::{fft2, CanonicalLayout};

pub use focuss::{
    default_noise_tolerance, focuss_recover, mfocuss_recover, mfocuss_with, FocussOptions, Regularization,
};
pub use greedy::{gsp_recover, sp_recover};
pub use grid::DirectionRangeGrid;

/// `N × (P_dir · Q_rng)` dictionary of steering vectors over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservingMatrix {
    pub columns: DMatrix<Complex64>,
    pub grid: DirectionRangeGrid,
    pub draw: FrequencyDraw,
    layout: Option<CanonicalLayout>,
}

impl ObservingMatrix {
    /// Wraps an arbitrary dictionary; columns must match the grid size.
    pub fn from_columns(columns: DMatrix<Complex64>, grid: DirectionRangeGrid, draw: FrequencyDraw) -> Result<Self> {
        if columns.ncols() != grid.len() || columns.nrows() != draw.len() {
            return Err(RfdaError::DimensionMismatch(format!(
                "{}×{} columns for a {}-point grid and {} elements",
                columns.nrows(),
                columns.ncols(),
                grid.len(),
                draw.len()
            )));
        }
        Ok(Self { columns, grid, draw, layout: None })
    }

    /// Whether the lattice shortcuts apply.
    pub fn is_canonical(&self) -> bool {
        self.layout.is_some()
    }

    pub fn n_rows(&self) -> usize {
        self.columns.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.ncols()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.columns.column_iter().map(|c| c.norm()).collect()
    }

    /// `Aᴴ Y`.
    pub(crate) fn correlate(&self, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match &self.layout {
            Some(lay) => lay.correlate(y),
            None => self.columns.ad_mul(y),
        }
    }

    /// `Σ_j w_j a_j a_jᴴ` over the listed columns.
    pub(crate) fn weighted_gram(&self, cols: &[usize], w: &[f64]) -> DMatrix<Complex64> {
        match &self.layout {
            Some(lay) => lay.weighted_gram(cols, w),
            None => {
                let mut sub = self.columns.select_columns(cols);
                let scaled = sub.clone();
                for (mut c, &wj) in sub.column_iter_mut().zip(w) {
                    c *= Complex64::from(wj);
                }
                sub * scaled.adjoint()
            }
        }
    }
}

fn canonical_layout(cfg: &ArrayConfig, draw: &FrequencyDraw, grid: &DirectionRangeGrid, columns: &DMatrix<Complex64>) -> Option<CanonicalLayout> {
    let m = grid.n_ranges();
    let rows = draw.grid_rows(m).ok()?;
    if DirectionRangeGrid::canonical(cfg, m).ok()? != *grid {
        return None;
    }
    let dir_bins = grid.direction_bins(cfg);
    let rng_bins = grid.range_bins(cfg, m);
    let cells: Vec<(usize, usize)> = (0..grid.len())
        .map(|j| {
            let (d, r) = grid.split(j);
            (rng_bins[r], dir_bins[d])
        })
        .collect();
    let phase = cells
        .iter()
        .enumerate()
        .map(|(j, &(i, _))| {
            let kernel = Complex64::from_polar(1.0, -2.0 * PI * (i * rows[0]) as f64 / m as f64);
            (columns[(0, j)] / kernel).conj()
        })
        .collect();
    Some(CanonicalLayout { m_levels: m, rows, cells, phase })
}

/// Output of a sparse recovery run.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// Sorted grid indices.
    pub support: Vec<usize>,
    /// `|support| × L`, rows in support order.
    pub amplitudes: DMatrix<Complex64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual Frobenius norm after initialization and each accepted iteration.
    pub residual_history: Vec<f64>,
}

/// Columns follow the approximate baseband model.
pub fn build_observing_matrix(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    grid: &DirectionRangeGrid,
) -> Result<ObservingMatrix> {
    let n = cfg.n_elements();
    if draw.len() != n {
        return Err(RfdaError::DimensionMismatch(format!(
            "draw has {} offsets but the array has {n} elements",
            draw.len()
        )));
    }
    let mut columns = DMatrix::zeros(n, grid.len());
    for i in 0..grid.len() {
        let (theta, r) = grid.point(i);
        let b = steering_vector_unchecked(cfg, draw.offsets(), theta, r, BasebandModel::Approximate);
        columns.set_column(i, &b);
    }
    let layout = canonical_layout(cfg, draw, grid, &columns);
    Ok(ObservingMatrix {
        columns,
        grid: grid.clone(),
        draw: draw.clone(),
        layout,
    })
}

/// `|⟨a_i, r(l)⟩| / ‖a_i‖²` per grid point, with `|·|²` averaged over snapshots.
pub fn matched_filter(echo: &EchoMatrix, obs: &ObservingMatrix) -> Result<Vec<f64>> {
    if echo.n_elements() != obs.n_rows() {
        return Err(RfdaError::DimensionMismatch(format!(
            "echo has {} rows but the observing matrix has {}",
            echo.n_elements(),
            obs.n_rows()
        )));
    }
    let l = echo.n_snapshots() as f64;
    let g = obs.correlate(&echo.samples);
    Ok(obs
        .columns
        .column_iter()
        .zip(g.row_iter())
        .map(|(col, row)| (row.norm_squared() / l).sqrt() / col.norm_squared())
        .collect())
}

/// Zero-padded 2D DFT of the filled `M × N` data matrix.
///
/// Element `n` is placed at row `m_n + (M−1)/2`, column `n`; the matrix is
/// padded to `(M·os_r) × (N·os_d)` and transformed with the positive-exponent
/// (unnormalized) kernel, so that bin `(os_r·i, os_d·k)` carries the matched
/// response of range cell `i` and direction bin `k`.
pub fn zero_padding_2dfft(
    echo: &[Complex64],
    draw: &FrequencyDraw,
    m_levels: usize,
    oversampling: (usize, usize),
) -> Result<DMatrix<Complex64>> {
    let (os_r, os_d) = oversampling;
    if os_r == 0 || os_d == 0 {
        return Err(invalid("oversampling", "factors must be at least 1"));
    }
    if echo.len() != draw.len() {
        return Err(RfdaError::DimensionMismatch(format!(
            "echo has {} entries but the draw has {}",
            echo.len(),
            draw.len()
        )));
    }
    let rows = draw.grid_rows(m_levels)?;
    let (nr, nc) = (m_levels * os_r, echo.len() * os_d);
    let mut data = DMatrix::<Complex64>::zeros(nr, nc);
    for (n, (&row, &v)) in rows.iter().zip(echo).enumerate() {
        data[(row, n)] = v;
    }

    fft2(&mut data, true);
    Ok(data)
}

/// Matched-filter map on a canonical grid computed through [`zero_padding_2dfft`].
///
/// Values are indexed like [`matched_filter`] and normalized the same way.
pub fn fast_matched_filter(
    cfg: &ArrayConfig,
    draw: &FrequencyDraw,
    grid: &DirectionRangeGrid,
    m_levels: usize,
    echo: &[Complex64],
) -> Result<Vec<f64>> {
    let spectrum = zero_padding_2dfft(echo, draw, m_levels, (1, 1))?;
    let dir_bins = grid.direction_bins(cfg);
    let rng_bins = grid.range_bins(cfg, m_levels);
    let n = cfg.n_elements() as f64;
    let mut out = vec![0.0; grid.len()];
    for (i_rng, &rb) in rng_bins.iter().enumerate() {
        for (i_dir, &db) in dir_bins.iter().enumerate() {
            out[grid.index(i_dir, i_rng)] = spectrum[(rb, db)].norm() / n;
        }
    }
    Ok(out)
}

/// True iff the recovered support equals `truth` as a set.
pub fn detection_success(result: &RecoveryResult, truth: &[usize]) -> bool {
    let a: BTreeSet<_> = result.support.iter().collect();
    let b: BTreeSet<_> = truth.iter().collect();
    a == b
}

/// Shape check shared by the recovery routines.
fn check_rows(obs: &ObservingMatrix, r: &DMatrix<Complex64>) -> Result<()> {
    if r.nrows() != obs.n_rows() {
        return Err(RfdaError::DimensionMismatch(format!(
            "echo has {} rows but the observing matrix has {}",
            r.nrows(),
            obs.n_rows()
        )));
    }
    if r.ncols() == 0 {
        return Err(invalid("echo", "need at least one snapshot"));
    }
    Ok(())
}

/// Least squares of `r` on the columns `support` of `a`, with a small ridge
/// when the Gram matrix is ill-conditioned.
fn least_squares(a: &DMatrix<Complex64>, support: &[usize], r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let sub = a.select_columns(support);
    let mut gram = sub.ad_mul(&sub);
    let rhs = sub.ad_mul(r);
    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let ridge = 1e-10 * a.nrows() as f64;
    if !(lo > 1e-10 * hi) {
        for k in 0..gram.nrows() {
            gram[(k, k)] += ridge;
        }
    }
    match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => {
            for k in 0..gram.nrows() {
                gram[(k, k)] += ridge;
            }
            gram.lu().solve(&rhs).unwrap_or_else(|| DMatrix::zeros(support.len(), r.ncols()))
        }
    }
}

fn residual(a: &DMatrix<Complex64>, support: &[usize], x: &DMatrix<Complex64>, r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    if support.is_empty() {
        return r.clone();
    }
    r - a.select_columns(support) * x
}

fn single_column(echo: &DVector<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(echo.len(), 1, echo.as_slice())
}
