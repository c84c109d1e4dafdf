use std::f64::consts::TAU;

use num_complex::Complex64;

use super::fft::Fft2;

/// Real values on the uniform grid `xᵢ = 2πi/nx`, `yⱼ = 2πj/ny`, stored y-outer.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self { nx, ny, values: vec![0.0; nx * ny] }
    }

    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(TAU * i as f64 / nx as f64, TAU * j as f64 / ny as f64));
            }
        }
        Self { nx, ny, values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (TAU * i as f64 / self.nx as f64, TAU * j as f64 / self.ny as f64)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index and value of the largest entry.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let (n, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bn, bv), (n, &v)| if v > bv { (n, v) } else { (bn, bv) });
        (n % self.nx, n / self.nx, v)
    }

    pub fn argmin(&self) -> (usize, usize, f64) {
        let (n, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bn, bv), (n, &v)| if v < bv { (n, v) } else { (bn, bv) });
        (n % self.nx, n / self.nx, v)
    }
}

/// Signed integer wavenumbers of an FFT axis of length `n`.
pub fn wavenumbers(n: usize) -> Vec<i64> {
    (0..n).map(|i| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 }).collect()
}

/// Fourier coefficients `q̂(k,l)` of a real field, `q = Σ q̂ exp(i(kx + ly))`,
/// kept only for `|k|, |l| ≤ k_max`. Stored at FFT positions of an `ny × nx` array.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub nx: usize,
    pub ny: usize,
    pub k_max: usize,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(nx: usize, ny: usize, k_max: usize) -> Self {
        Self { nx, ny, k_max, coeffs: vec![Complex64::default(); nx * ny] }
    }

    fn index(&self, k: i64, l: i64) -> usize {
        let i = k.rem_euclid(self.nx as i64) as usize;
        let j = l.rem_euclid(self.ny as i64) as usize;
        j * self.nx + i
    }

    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max || l.unsigned_abs() as usize > self.k_max {
            return Complex64::default();
        }
        self.coeffs[self.index(k, l)]
    }

    pub fn set(&mut self, k: i64, l: i64, z: Complex64) {
        let n = self.index(k, l);
        self.coeffs[n] = z;
    }

    /// Transform and truncate a grid field.
    pub fn from_grid(fft: &mut Fft2, grid: &GridField, k_max: usize) -> Self {
        let mut buf: Vec<Complex64> = grid.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut buf);
        let scale = 1.0 / (grid.nx * grid.ny) as f64;
        let mut out = Self { nx: grid.nx, ny: grid.ny, k_max, coeffs: buf };
        let (kx, ly) = (wavenumbers(grid.nx), wavenumbers(grid.ny));
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let keep = kx[i].unsigned_abs() as usize <= k_max && ly[j].unsigned_abs() as usize <= k_max;
                let c = &mut out.coeffs[j * grid.nx + i];
                *c = if keep { *c * scale } else { Complex64::default() };
            }
        }
        out
    }

    pub fn to_grid(&self, fft: &mut Fft2) -> GridField {
        let mut buf = self.coeffs.clone();
        fft.inverse(&mut buf);
        GridField { nx: self.nx, ny: self.ny, values: buf.iter().map(|z| z.re).collect() }
    }

    /// Direct evaluation of the series at an arbitrary point.
    pub fn eval_at(&self, x: f64, y: f64) -> f64 {
        let k = self.k_max as i64;
        let ex: Vec<Complex64> = (-k..=k).map(|m| Complex64::from_polar(1.0, m as f64 * x)).collect();
        let mut sum = Complex64::default();
        for l in -k..=k {
            let ey = Complex64::from_polar(1.0, l as f64 * y);
            let mut row = Complex64::default();
            for m in -k..=k {
                row += self.coeffs[self.index(m, l)] * ex[(m + k) as usize];
            }
            sum += row * ey;
        }
        sum.re
    }

    /// Largest violation of `q̂(−k,−l) = conj q̂(k,l)`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let k = self.k_max as i64;
        let mut worst: f64 = 0.0;
        for l in -k..=k {
            for m in -k..=k {
                worst = worst.max((self.get(m, l) - self.get(-m, -l).conj()).norm());
            }
        }
        worst
    }

    /// Largest coefficient magnitude outside the truncation window.
    pub fn max_beyond_truncation(&self) -> f64 {
        let (kx, ly) = (wavenumbers(self.nx), wavenumbers(self.ny));
        let mut worst: f64 = 0.0;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if kx[i].unsigned_abs() as usize > self.k_max || ly[j].unsigned_abs() as usize > self.k_max {
                    worst = worst.max(self.coeffs[j * self.nx + i].norm());
                }
            }
        }
        worst
    }
}
