use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalized 2-D complex FFT on a y-outer `ny × nx` array.
///
/// Rows are transformed in one batched call; columns go through a
/// transpose so that they are contiguous as well.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(nx);
        let row_inv = planner.plan_fft_inverse(nx);
        let col_fwd = planner.plan_fft_forward(ny);
        let col_inv = planner.plan_fft_inverse(ny);
        let len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            nx,
            ny,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            scratch: vec![Complex64::default(); len],
            transposed: vec![Complex64::default(); nx * ny],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `X[l][k] = Σ x[j][i] exp(−i(k xᵢ + l yⱼ))`.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        let (rows, cols) = (self.row_fwd.clone(), self.col_fwd.clone());
        self.run(data, &*rows, &*cols);
    }

    /// Inverse without the `1/(nx·ny)` factor.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let (rows, cols) = (self.row_inv.clone(), self.col_inv.clone());
        self.run(data, &*rows, &*cols);
    }

    fn run(&mut self, data: &mut [Complex64], rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.nx * self.ny, "buffer does not match the transform shape");
        rows.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.transposed, self.nx, self.ny);
        cols.process_with_scratch(&mut self.transposed, &mut self.scratch);
        transpose(&self.transposed, data, self.ny, self.nx);
    }
}

/// `dst[i][j] = src[j][i]` for `src` with `rows` rows of length `cols`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], cols: usize, rows: usize) {
    const B: usize = 32;
    for jb in (0..rows).step_by(B) {
        for ib in (0..cols).step_by(B) {
            for j in jb..(jb + B).min(rows) {
                for i in ib..(ib + B).min(cols) {
                    dst[i * rows + j] = src[j * cols + i];
                }
            }
        }
    }
}
