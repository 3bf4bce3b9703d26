//! Lattice shortcuts for canonical dictionaries.
//!
//! On a canonical grid every column is `b_n = φ_j · e^{−j2π(k n/N + i ρ_n/M)}`
//! relative to element 0, where `(i, k)` is the column's (range cell,
//! direction bin) and `ρ_n` the element's frequency row. Weighted Gram
//! matrices and dictionary correlations then reduce to 2D DFTs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CanonicalLayout {
    pub m_levels: usize,
    pub rows: Vec<usize>,
    /// `(range bin, direction bin)` per dictionary column.
    pub cells: Vec<(usize, usize)>,
    /// Column phase relative to the lattice kernel.
    pub phase: Vec<Complex64>,
}

/// In-place unnormalized 2D DFT; `inverse` selects the positive exponent.
pub(crate) fn fft2(data: &mut DMatrix<Complex64>, inverse: bool) {
    let (nr, nc) = data.shape();
    let mut planner = FftPlanner::new();
    let plan = |p: &mut FftPlanner<f64>, len| if inverse { p.plan_fft_inverse(len) } else { p.plan_fft_forward(len) };
    let fr = plan(&mut planner, nr);
    for mut col in data.column_iter_mut() {
        fr.process(col.as_mut_slice());
    }
    let fc = plan(&mut planner, nc);
    let mut t = data.transpose();
    for mut col in t.column_iter_mut() {
        fc.process(col.as_mut_slice());
    }
    data.copy_from(&t.transpose());
}

impl CanonicalLayout {
    fn n(&self) -> usize {
        self.rows.len()
    }

    /// `Aᴴ Y` for every dictionary column.
    pub fn correlate(&self, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (n, m) = (self.n(), self.m_levels);
        let mut out = DMatrix::zeros(self.cells.len(), y.ncols());
        let mut data = DMatrix::<Complex64>::zeros(m, n);
        for (l, col) in y.column_iter().enumerate() {
            data.fill(Complex64::new(0.0, 0.0));
            for (e, (&row, &v)) in self.rows.iter().zip(col.iter()).enumerate() {
                data[(row, e)] = v;
            }
            fft2(&mut data, true);
            for (j, &(i, k)) in self.cells.iter().enumerate() {
                out[(j, l)] = self.phase[j] * data[(i, k)];
            }
        }
        out
    }

    /// `Σ_j w_j a_j a_jᴴ` over the listed columns.
    pub fn weighted_gram(&self, cols: &[usize], w: &[f64]) -> DMatrix<Complex64> {
        let (n, m) = (self.n(), self.m_levels);
        let mut map = DMatrix::<Complex64>::zeros(m, n);
        for (&j, &wj) in cols.iter().zip(w) {
            let (i, k) = self.cells[j];
            map[(i, k)] += Complex64::from(wj);
        }
        fft2(&mut map, false);
        DMatrix::from_fn(n, n, |a, b| {
            let dr = (self.rows[a] + m - self.rows[b]) % m;
            let dc = (a + n - b) % n;
            map[(dr, dc)]
        })
    }
}
