//! Grid velocity snapshots with bicubic Hermite interpolation.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::solver::{SolverState, TorusSolver};
use super::spectral::GridField;
use crate::autodiff::Taylor1;
use crate::diagnostics::{FlowSource, VelocitySampler};
use crate::error::Result;
use crate::geometry::{Chart, FrameVector, Point};
use crate::lagrangian::Flow;

/// Frame velocity components and their coordinate derivatives on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFlow {
    pub chart: Chart,
    pub t: f64,
    /// `[u, v]`
    pub value: [GridField; 2],
    pub dx: [GridField; 2],
    pub dy: [GridField; 2],
    pub dxy: [GridField; 2],
}

const I: Complex64 = Complex64::new(0.0, 1.0);

impl TorusSolver {
    /// Velocity snapshot; derivatives follow from spectral derivatives of ψ,
    /// so no grid product is differentiated.
    pub fn grid_flow(&mut self, state: &SolverState) -> Result<GridFlow> {
        let psi = self.invert_laplacian(&state.q)?;
        let (nx, ny) = (self.params.nx, self.params.ny);
        let n = nx * ny;
        // Packed pairs: (ψx, ψy), (ψxx, ψyy), (ψxy, ψxxy), (ψxyy, unused).
        let mut packs = vec![vec![Complex64::default(); n]; 4];
        for &m in &self.active {
            let (k, l) = self.kl(m);
            let p = psi.coeffs[m];
            let dx = I * k * p;
            let dy = I * l * p;
            let dxx = -k * k * p;
            let dyy = -l * l * p;
            let dxy = -k * l * p;
            let dxxy = -I * k * k * l * p;
            let dxyy = -I * k * l * l * p;
            packs[0][m] = dx + I * dy;
            packs[1][m] = dxx + I * dyy;
            packs[2][m] = dxy + I * dxxy;
            packs[3][m] = dxyy;
        }
        for p in packs.iter_mut() {
            self.fft.inverse(p);
        }
        let mut out: Vec<GridField> = (0..8).map(|_| GridField::zeros(nx, ny)).collect();
        for m in 0..n {
            let (px, py) = (packs[0][m].re, packs[0][m].im);
            let (pxx, pyy) = (packs[1][m].re, packs[1][m].im);
            let (pxy, pxxy) = (packs[2][m].re, packs[2][m].im);
            let pxyy = packs[3][m].re;
            let (fx, fy, fxy) = (self.phi_x[m], self.phi_y[m], self.phi_xy[m]);
            let hinv = 1.0 / self.g[m].sqrt();
            let u = -py * hinv;
            let v = px * hinv;
            let ux = (-pxy + fx * py) * hinv;
            let uy = (-pyy + fy * py) * hinv;
            let uxy = (-pxyy + fxy * py + fx * pyy) * hinv - fy * ux;
            let vx = (pxx - fx * px) * hinv;
            let vy = (pxy - fy * px) * hinv;
            let vxy = (pxxy - fxy * px - fx * pxy) * hinv - fy * vx;
            for (f, val) in out.iter_mut().zip([u, v, ux, vx, uy, vy, uxy, vxy]) {
                f.values[m] = val;
            }
        }
        let mut it = out.into_iter();
        let mut two = || [it.next().unwrap(), it.next().unwrap()];
        Ok(GridFlow { chart: self.params.chart(), t: state.t, value: two(), dx: two(), dy: two(), dxy: two() })
    }
}

/// Cubic Hermite basis on [0, 1]: values for (p0, p1, m0, m1) and derivatives.
fn hermite(s: f64) -> ([f64; 4], [f64; 4]) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        [2.0 * s3 - 3.0 * s2 + 1.0, -2.0 * s3 + 3.0 * s2, s3 - 2.0 * s2 + s, s3 - s2],
        [6.0 * s2 - 6.0 * s, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, 3.0 * s2 - 2.0 * s],
    )
}

impl GridFlow {
    pub fn shape(&self) -> (usize, usize) {
        (self.value[0].nx, self.value[0].ny)
    }

    /// Interpolated component `c` with its coordinate gradient.
    pub fn interpolate(&self, c: usize, x: f64, y: f64) -> Taylor1 {
        let (nx, ny) = self.shape();
        let (hx, hy) = (TAU / nx as f64, TAU / ny as f64);
        let (xr, yr) = (x.rem_euclid(TAU) / hx, y.rem_euclid(TAU) / hy);
        let (i0, j0) = ((xr.floor() as usize).min(nx - 1), (yr.floor() as usize).min(ny - 1));
        let (s, t) = (xr - i0 as f64, yr - j0 as f64);
        let (i1, j1) = ((i0 + 1) % nx, (j0 + 1) % ny);
        let (bs, ds) = hermite(s);
        let (bt, dt) = hermite(t);
        let mut out = Taylor1::default();
        for (a, i) in [i0, i1].into_iter().enumerate() {
            for (b, j) in [j0, j1].into_iter().enumerate() {
                let f = self.value[c].at(i, j);
                let fx = self.dx[c].at(i, j) * hx;
                let fy = self.dy[c].at(i, j) * hy;
                let fxy = self.dxy[c].at(i, j) * hx * hy;
                let terms = [(f, a, b), (fx, a + 2, b), (fy, a, b + 2), (fxy, a + 2, b + 2)];
                for (w, ps, pt) in terms {
                    out.v += w * bs[ps] * bt[pt];
                    out.d[0] += w * ds[ps] * bt[pt] / hx;
                    out.d[1] += w * bs[ps] * dt[pt] / hy;
                }
            }
        }
        out
    }
}

impl VelocitySampler for GridFlow {
    fn chart(&self) -> Chart {
        self.chart
    }
    fn source(&self) -> FlowSource {
        FlowSource::Grid
    }
    fn is_steady(&self) -> bool {
        false
    }
    fn velocity(&self, p: Point) -> Result<FrameVector> {
        Ok(FrameVector::new(self.interpolate(0, p.x, p.y).v, self.interpolate(1, p.x, p.y).v))
    }
    fn jet(&self, p: Point) -> Result<[Taylor1; 2]> {
        Ok([self.interpolate(0, p.x, p.y), self.interpolate(1, p.x, p.y)])
    }
}

/// Linear interpolation in time between two snapshots.
pub struct TimeInterpolated<'a> {
    pub a: &'a GridFlow,
    pub b: &'a GridFlow,
}

impl TimeInterpolated<'_> {
    fn weight(&self, t: f64) -> f64 {
        let span = self.b.t - self.a.t;
        if span == 0.0 {
            0.0
        } else {
            (t - self.a.t) / span
        }
    }
}

impl Flow for TimeInterpolated<'_> {
    fn chart(&self) -> Chart {
        self.a.chart
    }
    fn velocity_at(&self, p: Point, t: f64) -> Result<FrameVector> {
        let w = self.weight(t);
        let (ua, ub) = (self.a.velocity(p)?, self.b.velocity(p)?);
        Ok(ua.scale(1.0 - w).add(ub.scale(w)))
    }
    fn jet_at(&self, p: Point, t: f64) -> Result<[Taylor1; 2]> {
        let w = self.weight(t);
        let (ja, jb) = (self.a.jet(p)?, self.b.jet(p)?);
        Ok([ja[0] * (1.0 - w) + jb[0] * w, ja[1] * (1.0 - w) + jb[1] * w])
    }
}
