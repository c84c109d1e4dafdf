//! Irrotational jet on the Poincaré disk, `u − iv = (1 − |z|²)/(z² + 1)`.

use num_complex::Complex64;

use crate::autodiff::{Scalar, Taylor1};
use crate::diagnostics::{frame_gradient, vorticity, AnalyticFlow, VelocitySampler};
use crate::error::{Error, Result};
use crate::geometry::{metric_at, Chart, FrameVector, Point};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiskFlow;

impl AnalyticFlow for DiskFlow {
    fn chart(&self) -> Chart {
        Chart::disk()
    }

    fn eval<T: Scalar>(&self, x: T, y: T) -> [T; 2] {
        let a = x * x - y * y + 1.0;
        let b = x * y * 2.0;
        let w = -(x * x + y * y) + 1.0;
        let s = w / (a * a + b * b);
        [s * a, s * b]
    }
}

pub fn disk_velocity(p: Point) -> Result<FrameVector> {
    DiskFlow.velocity(p)
}

/// `ψ = −2 Im(arctan z)`, so that `u = −ψ_y/√g`, `v = ψ_x/√g` and `ψ(0) = 0`.
pub fn disk_stream_function(p: Point) -> Result<f64> {
    Chart::disk().validate(p)?;
    Ok(-2.0 * Complex64::new(p.x, p.y).atan().im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskReport {
    /// Largest Cauchy–Riemann defect of `√g (u − iv)`.
    pub cauchy_riemann: f64,
    pub divergence: f64,
    pub vorticity: f64,
    /// Largest relative mismatch between the velocity and `ψ` differentiated numerically.
    pub stream_round_trip: f64,
    pub points: usize,
}

/// Interior cell centres of an `n × n` grid over `[−1, 1]²`.
pub fn interior_grid(n: usize) -> Vec<Point> {
    let h = 2.0 / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let p = Point::new(-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
            if p.x * p.x + p.y * p.y < 1.0 {
                out.push(p);
            }
        }
    }
    out
}

/// Residual checks on the interior of an `n × n` grid.
///
/// Holomorphy, divergence and vorticity use exact forward-mode derivatives;
/// the stream-function round trip uses a fourth-order stencil whose step
/// shrinks with the distance to the boundary poles at `±i`.
pub fn disk_flow_checks(n: usize) -> Result<DiskReport> {
    let chart = Chart::disk();
    let mut rep = DiskReport { cauchy_riemann: 0.0, divergence: 0.0, vorticity: 0.0, stream_round_trip: 0.0, points: 0 };
    for p in interior_grid(n) {
        let (x, y) = (Taylor1::var(p.x, 0), Taylor1::var(p.y, 1));
        let [u, v] = DiskFlow.eval(x, y);
        let (h, _) = chart.scale_factors(x, y);
        // F = P + iQ = h(u − iv).
        let (pr, qi) = (h * u, -(h * v));
        let cr = (pr.d[0] - qi.d[1]).abs().max((pr.d[1] + qi.d[0]).abs());
        let m = metric_at(&chart, p)?;
        let g = frame_gradient(&m, u, v);
        rep.cauchy_riemann = rep.cauchy_riemann.max(cr);
        rep.divergence = rep.divergence.max(g.trace().abs());
        rep.vorticity = rep.vorticity.max(vorticity(&g).abs());

        let pole = (Complex64::new(p.x, p.y.abs()) - Complex64::i()).norm();
        let d = 1e-3 * pole.min(1.0 - p.x.hypot(p.y)).max(1e-12);
        let psi = |dx: f64, dy: f64| disk_stream_function(Point::new(p.x + dx, p.y + dy));
        let stencil = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
            Ok((8.0 * (f(d)? - f(-d)?) - (f(2.0 * d)? - f(-2.0 * d)?)) / (12.0 * d))
        };
        let psi_x = stencil(&|s| psi(s, 0.0))?;
        let psi_y = stencil(&|s| psi(0.0, s))?;
        let (uu, vv) = (-psi_y / m.h1(), psi_x / m.h1());
        let err = (uu - u.v).hypot(vv - v.v) / u.v.hypot(v.v).max(1e-300);
        rep.stream_round_trip = rep.stream_round_trip.max(err);
        rep.points += 1;
    }
    Ok(rep)
}

/// Streamline on the level `psi`, traced both ways from the imaginary axis
/// until it comes within `margin` of the boundary.
pub fn streamline(psi: f64, ds: f64, margin: f64, max_steps: usize) -> Result<Vec<Point>> {
    let y0 = (-0.5 * psi).tanh();
    if y0.abs() >= 1.0 - margin {
        return Err(Error::Usage(format!("level {psi} does not reach the interior")));
    }
    // Unit coordinate direction of the velocity.
    let dir = |p: Point| -> Option<[f64; 2]> {
        let u = disk_velocity(p).ok()?;
        let n = u.norm();
        (n > 0.0).then(|| [u.c1 / n, u.c2 / n])
    };
    let inside = |p: Point| p.x.hypot(p.y) < 1.0 - margin;
    let trace = |sign: f64| -> Vec<Point> {
        let mut pts = Vec::new();
        let mut p = Point::new(0.0, y0);
        for _ in 0..max_steps {
            let step = |p: Point, k: [f64; 2], s: f64| Point::new(p.x + sign * s * k[0], p.y + sign * s * k[1]);
            let Some(k1) = dir(p) else { break };
            let Some(k2) = dir(step(p, k1, 0.5 * ds)) else { break };
            let Some(k3) = dir(step(p, k2, 0.5 * ds)) else { break };
            let Some(k4) = dir(step(p, k3, ds)) else { break };
            let q = Point::new(
                p.x + sign * ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                p.y + sign * ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            );
            if !inside(q) {
                break;
            }
            pts.push(q);
            p = q;
        }
        pts
    };
    let mut back = trace(-1.0);
    back.reverse();
    back.push(Point::new(0.0, y0));
    back.extend(trace(1.0));
    Ok(back)
}
