//! Pseudo-spectral vorticity solver on the torus with metric
//! `g (dx² + dy²)`, `g = exp(α sin x sin y)`:
//!
//! `∂q/∂t + g⁻¹(ψ_x q_y − ψ_y q_x) = ν g⁻¹ Δq`, `Δψ = g q`.
//!
//! Products are formed on the grid without padding and re-truncated to
//! `|k|, |l| ≤ K`; the metric's Fourier coefficients decay faster than
//! geometrically, which keeps the aliasing residue small.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::fft::Fft2;
use super::spectral::{wavenumbers, GridField, SpectralField};
use crate::error::{Error, Result};
use crate::geometry::Chart;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusParams {
    pub alpha: f64,
    pub nu: f64,
    pub dt: f64,
    pub k_max: usize,
    pub nx: usize,
    pub ny: usize,
}

impl TorusParams {
    /// 256² grid with K = 85.
    pub fn desk() -> Self {
        Self { alpha: 1.8, nu: 1e-6, dt: 1e-3, k_max: 85, nx: 256, ny: 256 }
    }

    /// 800² grid with K = 199.
    pub fn full() -> Self {
        Self { k_max: 199, nx: 800, ny: 800, ..Self::desk() }
    }

    pub fn validate(&self) -> Result<()> {
        let need = 2 * self.k_max + 2;
        if self.nx < need || self.ny < need {
            return Err(Error::Usage(format!(
                "grid {}x{} too small for K={} (need at least {need})",
                self.nx, self.ny, self.k_max
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Usage(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(Error::Usage(format!("nu must be >= 0, got {}", self.nu)));
        }
        Chart::torus(self.alpha)?;
        Ok(())
    }

    pub fn chart(&self) -> Chart {
        Chart::torus(self.alpha).expect("validated alpha")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub q: SpectralField,
    pub t: f64,
    pub params: TorusParams,
    /// Enstrophy removed by viscosity so far, `∫ ν ∫|∇q|² dxdy dt`.
    pub dissipated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Budget {
    /// `½ ∫ |u|² g dxdy`
    pub energy: f64,
    /// `½ ∫ q² g dxdy`
    pub enstrophy: f64,
    /// `∫ |grad q|² g dxdy`, the viscous enstrophy sink per unit ν.
    pub palinstrophy: f64,
}

pub struct TorusSolver {
    pub(crate) params: TorusParams,
    pub(crate) fft: Fft2,
    pub(crate) g: Vec<f64>,
    pub(crate) ginv: Vec<f64>,
    /// Derivatives of `φ = ½ log g`.
    pub(crate) phi_x: Vec<f64>,
    pub(crate) phi_y: Vec<f64>,
    pub(crate) phi_xy: Vec<f64>,
    pub(crate) kx: Vec<f64>,
    pub(crate) ly: Vec<f64>,
    /// FFT positions inside the truncation window.
    pub(crate) active: Vec<usize>,
    /// Grid Fourier coefficients of g.
    g_hat: Vec<Complex64>,
    bufs: [Vec<Complex64>; 4],
    stage: [Vec<Complex64>; 5],
}

impl TorusSolver {
    pub fn new(params: TorusParams) -> Result<Self> {
        params.validate()?;
        let (nx, ny) = (params.nx, params.ny);
        let n = nx * ny;
        let a = params.alpha;
        let mut g = Vec::with_capacity(n);
        let (mut px, mut py, mut pxy) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for j in 0..ny {
            let (sy, cy) = (TAU * j as f64 / ny as f64).sin_cos();
            for i in 0..nx {
                let (sx, cx) = (TAU * i as f64 / nx as f64).sin_cos();
                g.push((a * sx * sy).exp());
                px.push(0.5 * a * cx * sy);
                py.push(0.5 * a * sx * cy);
                pxy.push(0.5 * a * cx * cy);
            }
        }
        let ginv = g.iter().map(|v| 1.0 / v).collect();
        let kxi = wavenumbers(nx);
        let lyi = wavenumbers(ny);
        let mut active = Vec::new();
        for (j, l) in lyi.iter().enumerate() {
            for (i, k) in kxi.iter().enumerate() {
                if k.unsigned_abs() as usize <= params.k_max && l.unsigned_abs() as usize <= params.k_max {
                    active.push(j * nx + i);
                }
            }
        }
        let mut fft = Fft2::new(nx, ny);
        let mut g_hat: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut g_hat);
        let scale = 1.0 / n as f64;
        g_hat.iter_mut().for_each(|z| *z *= scale);
        let zeros = || vec![Complex64::default(); n];
        Ok(Self {
            params,
            fft,
            g,
            ginv,
            phi_x: px,
            phi_y: py,
            phi_xy: pxy,
            kx: kxi.iter().map(|&k| k as f64).collect(),
            ly: lyi.iter().map(|&l| l as f64).collect(),
            active,
            g_hat,
            bufs: [zeros(), zeros(), zeros(), zeros()],
            stage: [zeros(), zeros(), zeros(), zeros(), zeros()],
        })
    }

    pub fn params(&self) -> &TorusParams {
        &self.params
    }

    pub fn metric_grid(&self) -> GridField {
        GridField { nx: self.params.nx, ny: self.params.ny, values: self.g.clone() }
    }

    pub fn fft(&mut self) -> &mut Fft2 {
        &mut self.fft
    }

    pub(crate) fn kl(&self, n: usize) -> (f64, f64) {
        (self.kx[n % self.params.nx], self.ly[n / self.params.nx])
    }

    fn npts(&self) -> f64 {
        (self.params.nx * self.params.ny) as f64
    }

    /// Wraps a spectral array as a state at time `t`.
    pub fn state_from_spectral(&self, q: SpectralField, t: f64) -> Result<SolverState> {
        if q.nx != self.params.nx || q.ny != self.params.ny {
            return Err(Error::Usage("spectral field shape does not match the solver grid".into()));
        }
        let mut q = q;
        q.k_max = self.params.k_max;
        let mut st = SolverState { q, t, params: self.params, dissipated: 0.0 };
        self.truncate(&mut st.q.coeffs);
        Ok(st)
    }

    /// State from grid values, truncated and with zero g-weighted mean.
    pub fn state_from_grid(&mut self, q: &GridField, t: f64) -> Result<SolverState> {
        if q.nx != self.params.nx || q.ny != self.params.ny {
            return Err(Error::Usage("grid field shape does not match the solver grid".into()));
        }
        let spec = SpectralField::from_grid(&mut self.fft, q, self.params.k_max);
        let mut st = self.state_from_spectral(spec, t)?;
        self.project_mean(&mut st.q.coeffs);
        Ok(st)
    }

    fn truncate(&self, c: &mut [Complex64]) {
        let mut keep = vec![false; c.len()];
        for &n in &self.active {
            keep[n] = true;
        }
        for (z, k) in c.iter_mut().zip(keep) {
            if !k {
                *z = Complex64::default();
            }
        }
    }

    /// `(1/N) Σ g q` over the grid, i.e. the area mean of `q g`.
    pub fn g_mean_coeffs(&self, q: &[Complex64]) -> f64 {
        let mut s = Complex64::default();
        for &n in &self.active {
            s += self.g_hat[n].conj() * q[n];
        }
        s.re
    }

    pub fn g_weighted_mean(&self, state: &SolverState) -> f64 {
        self.g_mean_coeffs(&state.q.coeffs)
    }

    fn project_mean(&self, q: &mut [Complex64]) {
        let m = self.g_mean_coeffs(q);
        q[0] -= Complex64::new(m / self.g_hat[0].re, 0.0);
    }

    /// Solves `Δψ = g q`; fails if the g-weighted mean of `q` is not zero.
    pub fn invert_laplacian(&mut self, q: &SpectralField) -> Result<SpectralField> {
        let m = self.g_mean_coeffs(&q.coeffs);
        let scale = q.coeffs.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        if m.abs() > 1e-10 * scale.max(1e-300) {
            return Err(Error::Consistency(format!("g-weighted mean of q is {m:e}, not zero")));
        }
        let mut buf = q.coeffs.clone();
        self.fft.inverse(&mut buf);
        for (z, g) in buf.iter_mut().zip(&self.g) {
            *z = Complex64::new(z.re * g, 0.0);
        }
        self.fft.forward(&mut buf);
        let mut psi = SpectralField::zeros(q.nx, q.ny, self.params.k_max);
        let inv_n = 1.0 / self.npts();
        for &n in &self.active {
            let (k, l) = self.kl(n);
            let k2 = k * k + l * l;
            if k2 > 0.0 {
                psi.coeffs[n] = -buf[n] * inv_n / k2;
            }
        }
        Ok(psi)
    }

    /// Frame velocity `u = −ψ_y/√g`, `v = ψ_x/√g` on the grid.
    pub fn velocity_from_psi(&mut self, psi: &SpectralField) -> (GridField, GridField) {
        let b = &mut self.bufs[0];
        b.iter_mut().for_each(|z| *z = Complex64::default());
        for &n in &self.active {
            let (k, l) = (self.kx[n % self.params.nx], self.ly[n / self.params.nx]);
            b[n] = I * k * psi.coeffs[n] - l * psi.coeffs[n];
        }
        self.fft.inverse(&mut self.bufs[0]);
        let (nx, ny) = (self.params.nx, self.params.ny);
        let mut u = GridField::zeros(nx, ny);
        let mut v = GridField::zeros(nx, ny);
        for (n, z) in self.bufs[0].iter().enumerate() {
            let h = self.g[n].sqrt();
            u.values[n] = -z.im / h;
            v.values[n] = z.re / h;
        }
        (u, v)
    }

    /// `dq̂/dt` into `out`; returns the instantaneous viscous sink `ν∫|∇q|²`.
    fn rhs_into(&mut self, q: &[Complex64], out: &mut [Complex64]) -> f64 {
        let nx = self.params.nx;
        let nu = self.params.nu;
        let inv_n = 1.0 / self.npts();
        let [b1, b2, b3, b4] = &mut self.bufs;
        for b in [&mut *b1, &mut *b2, &mut *b3] {
            b.iter_mut().for_each(|z| *z = Complex64::default());
        }
        let mut grad_sq = 0.0;
        for &n in &self.active {
            let (k, l) = (self.kx[n % nx], self.ly[n / nx]);
            let k2 = k * k + l * l;
            b1[n] = q[n] - I * (k2 * q[n]);
            b3[n] = I * k * q[n] - l * q[n];
            grad_sq += k2 * q[n].norm_sqr();
        }
        self.fft.inverse(b1);
        self.fft.inverse(b3);
        // g q on the grid, then ψ̂ = −P_K(ĝq)/|k|².
        for (z, (w, g)) in b2.iter_mut().zip(b1.iter().zip(&self.g)) {
            *z = Complex64::new(w.re * g, 0.0);
        }
        self.fft.forward(b2);
        for z in b4.iter_mut() {
            *z = Complex64::default();
        }
        for &n in &self.active {
            let (k, l) = (self.kx[n % nx], self.ly[n / nx]);
            let k2 = k * k + l * l;
            if k2 > 0.0 {
                let psi = -b2[n] * inv_n / k2;
                b4[n] = I * k * psi - l * psi;
            }
        }
        self.fft.inverse(b4);
        // b1 = q + iΔq, b3 = q_x + i q_y, b4 = ψ_x + i ψ_y.
        for n in 0..b4.len() {
            let (px, py) = (b4[n].re, b4[n].im);
            let (qx, qy) = (b3[n].re, b3[n].im);
            let f = (-(px * qy - py * qx) + nu * b1[n].im) * self.ginv[n];
            b4[n] = Complex64::new(f, 0.0);
        }
        self.fft.forward(b4);
        out.iter_mut().for_each(|z| *z = Complex64::default());
        for &n in &self.active {
            out[n] = b4[n] * inv_n;
        }
        nu * TAU * TAU * grad_sq
    }

    pub fn rhs(&mut self, state: &SolverState) -> SpectralField {
        let mut out = SpectralField::zeros(self.params.nx, self.params.ny, self.params.k_max);
        self.rhs_into(&state.q.coeffs, &mut out.coeffs);
        out
    }

    /// One classical RK4 step of size `dt`.
    pub fn step_rk4(&mut self, state: &SolverState) -> Result<SolverState> {
        let dt = self.params.dt;
        let mut stage = std::mem::take(&mut self.stage);
        let [k1, k2, k3, k4, tmp] = &mut stage;
        let q = &state.q.coeffs;
        let s1 = self.rhs_into(q, k1);
        for &n in &self.active {
            tmp[n] = q[n] + 0.5 * dt * k1[n];
        }
        let s2 = self.rhs_into(tmp, k2);
        for &n in &self.active {
            tmp[n] = q[n] + 0.5 * dt * k2[n];
        }
        let s3 = self.rhs_into(tmp, k3);
        for &n in &self.active {
            tmp[n] = q[n] + dt * k3[n];
        }
        let s4 = self.rhs_into(tmp, k4);
        let mut next = state.q.clone();
        let mut finite = true;
        for &n in &self.active {
            let z = q[n] + dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
            finite &= z.re.is_finite() && z.im.is_finite();
            next.coeffs[n] = z;
        }
        self.stage = stage;
        let t = state.t + dt;
        if !finite {
            return Err(Error::BlowUp { t, max_abs_q: f64::INFINITY, enstrophy: f64::INFINITY });
        }
        self.project_mean(&mut next.coeffs);
        let dissipated = state.dissipated + dt / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        Ok(SolverState { q: next, t, params: self.params, dissipated })
    }

    pub fn budget(&mut self, state: &SolverState) -> Result<Budget> {
        let psi = self.invert_laplacian(&state.q)?;
        let mut energy = 0.0;
        let mut pal = 0.0;
        for &n in &self.active {
            let (k, l) = self.kl(n);
            let k2 = k * k + l * l;
            energy += k2 * psi.coeffs[n].norm_sqr();
            pal += k2 * state.q.coeffs[n].norm_sqr();
        }
        let q = state.q.to_grid(&mut self.fft);
        let z: f64 = q.values.iter().zip(&self.g).map(|(q, g)| q * q * g).sum();
        let area = TAU * TAU;
        let b = Budget {
            energy: 0.5 * area * energy,
            enstrophy: 0.5 * area * z / self.npts(),
            palinstrophy: area * pal,
        };
        if !(b.energy.is_finite() && b.enstrophy.is_finite()) {
            return Err(Error::BlowUp { t: state.t, max_abs_q: q.max_abs(), enstrophy: b.enstrophy });
        }
        Ok(b)
    }

    pub fn vorticity_grid(&mut self, state: &SolverState) -> GridField {
        state.q.to_grid(&mut self.fft)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(alpha: f64, nu: f64) -> TorusSolver {
        TorusSolver::new(TorusParams { alpha, nu, dt: 1e-3, k_max: 10, nx: 32, ny: 32 }).unwrap()
    }

    #[test]
    fn rejects_small_grids() {
        let p = TorusParams { k_max: 20, nx: 32, ny: 32, ..TorusParams::desk() };
        assert!(TorusSolver::new(p).is_err());
    }

    #[test]
    fn flat_inversion_of_cosine() {
        let mut s = small(0.0, 0.0);
        let q = GridField::from_fn(32, 32, |x, _| -x.cos());
        let st = s.state_from_grid(&q, 0.0).unwrap();
        let psi = s.invert_laplacian(&st.q).unwrap();
        assert!((psi.get(1, 0).re - 0.5).abs() < 1e-14 && (psi.get(-1, 0).re - 0.5).abs() < 1e-14);
        let (u, v) = s.velocity_from_psi(&psi);
        for j in 0..32 {
            for i in 0..32 {
                let (x, _) = u.coords(i, j);
                assert!(u.at(i, j).abs() < 1e-13);
                assert!((v.at(i, j) + x.sin()).abs() < 1e-13);
            }
        }
        assert!(s.rhs(&st).coeffs.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn curved_inversion_recovers_stream_function() {
        let a = 1.8;
        let mut s = TorusSolver::new(TorusParams { alpha: a, nu: 0.0, dt: 1e-3, k_max: 30, nx: 64, ny: 64 }).unwrap();
        let q = GridField::from_fn(64, 64, |x, y| {
            let p = x.sin() * y.sin();
            -2.0 * (-a * p).exp() * p
        });
        let st = s.state_from_grid(&q, 0.0).unwrap();
        let psi = s.invert_laplacian(&st.q).unwrap();
        let got = psi.to_grid(&mut s.fft);
        for j in 0..64 {
            for i in 0..64 {
                let (x, y) = got.coords(i, j);
                assert!((got.at(i, j) - x.sin() * y.sin()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let mut s = small(1.0, 0.0);
        let mut q = SpectralField::zeros(32, 32, 10);
        q.set(0, 0, Complex64::new(1.0, 0.0));
        assert!(matches!(s.invert_laplacian(&q), Err(Error::Consistency(_))));
    }

    #[test]
    fn diffusion_of_a_single_mode() {
        let nu = 0.01;
        let mut s = small(0.0, nu);
        let q = GridField::from_fn(32, 32, |x, _| (3.0 * x).cos());
        let st = s.state_from_grid(&q, 0.0).unwrap();
        let r = s.rhs(&st);
        assert!((r.get(3, 0).re + 9.0 * nu * 0.5).abs() < 1e-15);
        let next = s.step_rk4(&st).unwrap();
        let ratio = next.q.get(3, 0).re / 0.5;
        assert!((ratio - (-9.0 * nu * 1e-3f64).exp()).abs() < 1e-15);
        assert!((next.t - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn zero_field_is_stationary() {
        let mut s = small(1.8, 0.0);
        let st = s.state_from_grid(&GridField::zeros(32, 32), 0.0).unwrap();
        let next = s.step_rk4(&st).unwrap();
        assert_eq!(next.q, st.q);
        let b = s.budget(&st).unwrap();
        assert_eq!((b.energy, b.enstrophy, b.palinstrophy), (0.0, 0.0, 0.0));
    }

    #[test]
    fn flat_two_mode_energy_is_conserved() {
        let mut s = small(0.0, 0.0);
        let q = GridField::from_fn(32, 32, |x, y| x.cos() * y.cos() + 0.3 * (2.0 * x + y).sin());
        let mut st = s.state_from_grid(&q, 0.0).unwrap();
        let e0 = s.budget(&st).unwrap().energy;
        for _ in 0..100 {
            st = s.step_rk4(&st).unwrap();
        }
        let e1 = s.budget(&st).unwrap().energy;
        assert!(((e1 - e0) / e0).abs() < 1e-12);
    }
}
