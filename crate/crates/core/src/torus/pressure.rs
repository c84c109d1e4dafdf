//! Pressure from `Δ_g p = −div(∇_u u)`, which holds for unsteady flow too
//! because `div ∂u/∂t = 0`.

use num_complex::Complex64;

use super::sampler::GridFlow;
use super::solver::{SolverState, TorusSolver};
use super::spectral::{GridField, SpectralField};
use crate::autodiff::Taylor1;
use crate::diagnostics::{frame_gradient, FrameTensor2};
use crate::error::Result;
use crate::geometry::{metric_at, Point};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    pub p: SpectralField,
    pub grid: GridField,
    /// Frame Hessian `H(p)` at every grid node.
    pub hessian: Vec<FrameTensor2>,
}

impl TorusSolver {
    pub fn pressure_solve(&mut self, state: &SolverState) -> Result<PressureField> {
        let flow = self.grid_flow(state)?;
        Ok(self.pressure_from_flow(&flow))
    }

    pub fn pressure_from_flow(&mut self, flow: &GridFlow) -> PressureField {
        let (nx, ny) = (self.params.nx, self.params.ny);
        let n = nx * ny;
        // √g W in frame components, packed as one complex grid.
        let mut buf = vec![Complex64::default(); n];
        for m in 0..n {
            let h = self.g[m].sqrt();
            let (a, b) = (self.phi_y[m] / h, self.phi_x[m] / h);
            let (u, v) = (flow.value[0].values[m], flow.value[1].values[m]);
            let (ux, uy) = (flow.dx[0].values[m], flow.dy[0].values[m]);
            let (vx, vy) = (flow.dx[1].values[m], flow.dy[1].values[m]);
            let w1 = (u * ux + v * uy) / h + a * u * v - b * v * v;
            let w2 = (u * vx + v * vy) / h - a * u * u + b * u * v;
            buf[m] = Complex64::new(h * w1, h * w2);
        }
        self.fft.forward(&mut buf);
        let inv_n = 1.0 / n as f64;
        let mut p = SpectralField::zeros(nx, ny, self.params.k_max);
        for &m in &self.active {
            let (k, l) = self.kl(m);
            let k2 = k * k + l * l;
            if k2 == 0.0 {
                continue;
            }
            // Split the packed transform into the spectra of the two real fields.
            let mi = neg_index(m, nx, ny);
            let z = buf[m];
            let zc = buf[mi].conj();
            let a1 = 0.5 * (z + zc);
            let a2 = -0.5 * I * (z - zc);
            // Δp = −∂x(√g W1) − ∂y(√g W2).
            p.coeffs[m] = (I * k * a1 + I * l * a2) * inv_n / k2;
        }
        // Derivatives: (p, p_x), (p_y, p_xx), (p_xy, p_yy).
        let mut packs = vec![vec![Complex64::default(); n]; 3];
        for &m in &self.active {
            let (k, l) = self.kl(m);
            let c = p.coeffs[m];
            packs[0][m] = c + I * (I * k * c);
            packs[1][m] = I * l * c + I * (-k * k * c);
            packs[2][m] = -k * l * c + I * (-l * l * c);
        }
        for pk in packs.iter_mut() {
            self.fft.inverse(pk);
        }
        let chart = self.params.chart();
        let mut grid = GridField::zeros(nx, ny);
        let mut hessian = Vec::with_capacity(n);
        for m in 0..n {
            let (pv, px) = (packs[0][m].re, packs[0][m].im);
            let (py, pxx) = (packs[1][m].re, packs[1][m].im);
            let (pxy, pyy) = (packs[2][m].re, packs[2][m].im);
            grid.values[m] = pv;
            let hinv = 1.0 / self.g[m].sqrt();
            let (fx, fy) = (self.phi_x[m], self.phi_y[m]);
            // Frame gradient of p: P_a = p_a/√g.
            let p1 = Taylor1::new(px * hinv, [(pxx - px * fx) * hinv, (pxy - px * fy) * hinv]);
            let p2 = Taylor1::new(py * hinv, [(pxy - py * fx) * hinv, (pyy - py * fy) * hinv]);
            let (x, y) = grid.coords(m % nx, m / nx);
            let md = metric_at(&chart, Point::new(x, y)).expect("torus points are always valid");
            hessian.push(frame_gradient(&md, p1, p2));
        }
        PressureField { p, grid, hessian }
    }
}

fn neg_index(m: usize, nx: usize, ny: usize) -> usize {
    let (i, j) = (m % nx, m / nx);
    ((ny - j) % ny) * nx + (nx - i) % nx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::initial::initial_condition;
    use crate::torus::solver::TorusParams;

    #[test]
    fn zero_and_shear_flows_have_no_pressure() {
        let mut s = TorusSolver::new(TorusParams { alpha: 0.0, k_max: 10, nx: 32, ny: 32, ..TorusParams::desk() }).unwrap();
        let st = s.state_from_grid(&GridField::zeros(32, 32), 0.0).unwrap();
        assert_eq!(s.pressure_solve(&st).unwrap().grid.max_abs(), 0.0);
        let st = s.state_from_grid(&GridField::from_fn(32, 32, |x, _| -x.cos()), 0.0).unwrap();
        let pr = s.pressure_solve(&st).unwrap();
        assert!(pr.grid.max_abs() < 1e-14);
    }

    #[test]
    fn hessian_is_symmetric_and_vortex_sits_in_a_low() {
        let mut s = TorusSolver::new(TorusParams { k_max: 30, nx: 64, ny: 64, ..TorusParams::desk() }).unwrap();
        let st = initial_condition(&mut s).unwrap();
        let pr = s.pressure_solve(&st).unwrap();
        for h in &pr.hessian {
            assert!((h.m12 - h.m21).abs() < 1e-8 * (1.0 + h.frobenius()));
        }
        let tau = std::f64::consts::TAU;
        let p_at = |fx: f64, fy: f64| pr.p.eval_at(fx * tau, fy * tau);
        let mean = pr.grid.values.iter().sum::<f64>() / pr.grid.values.len() as f64;
        assert!(p_at(0.30, 0.70) < mean);
    }
}
