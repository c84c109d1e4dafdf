//! Independent oracles for the integration and acceptance tests.
#![allow(dead_code)]

use riemflow::geometry::{metric_at, Chart, ChartKind, Point};
use riemflow::lagrangian::{advect, sphere_embed};
use riemflow::VelocitySampler;

/// Stretching acceleration of a meridional element in the zonal jet, written
/// out per branch.
pub fn jet_acceleration_oracle(mu0: f64, delta_q: f64, mu: f64) -> f64 {
    let half = 0.5 * delta_q;
    if mu >= mu0 {
        ((1.0 - mu) / (1.0 + mu)).powi(2) * (1.0 + mu0).powi(2) * half * half
    } else {
        ((1.0 + mu) / (1.0 - mu)).powi(2) * (1.0 - mu0).powi(2) * half * half
    }
}

/// Gaussian curvature of an orthogonal metric `E dx² + G dy²` by nested
/// central differences of the metric components, Richardson-extrapolated.
pub fn gaussian_curvature_fd(chart: &Chart, p: Point) -> f64 {
    // The disk metric varies on the scale of the distance to the boundary.
    let s = match chart.kind() {
        ChartKind::PoincareDisk => (10.0 * (1.0 - p.x.hypot(p.y))).min(1.0),
        _ => 1.0,
    };
    let (a, b) = (curvature_fd_step(chart, p, 2e-3 * s), curvature_fd_step(chart, p, 1e-3 * s));
    (4.0 * b - a) / 3.0
}

fn curvature_fd_step(chart: &Chart, p: Point, h: f64) -> f64 {
    let eg = |x: f64, y: f64| {
        let m = metric_at(chart, Point::new(x, y)).unwrap();
        (m.g11, m.g22)
    };
    // K = −1/(2√(EG)) [∂x(G_x/√(EG)) + ∂y(E_y/√(EG))].
    let gx_over = |x: f64, y: f64| {
        let (e, g) = eg(x, y);
        let gx = (eg(x + h, y).1 - eg(x - h, y).1) / (2.0 * h);
        gx / (e * g).sqrt()
    };
    let ey_over = |x: f64, y: f64| {
        let (e, g) = eg(x, y);
        let ey = (eg(x, y + h).0 - eg(x, y - h).0) / (2.0 * h);
        ey / (e * g).sqrt()
    };
    let (e, g) = eg(p.x, p.y);
    let d1 = (gx_over(p.x + h, p.y) - gx_over(p.x - h, p.y)) / (2.0 * h);
    let d2 = (ey_over(p.x, p.y + h) - ey_over(p.x, p.y - h)) / (2.0 * h);
    -(d1 + d2) / (2.0 * (e * g).sqrt())
}

/// FTLE from central differences of the time-`T` flow map on the sphere,
/// measured in the embedding.
pub fn sphere_ftle_by_flow_map<S: VelocitySampler>(sampler: &S, x0: Point, t: f64, dt: f64, h: f64) -> f64 {
    let m = metric_at(&Chart::sphere(), x0).unwrap();
    let end = |p: Point| sphere_embed(advect(sampler, p, 0.0, t, dt).unwrap().last()).0;
    let cols: Vec<[f64; 3]> = [(h / m.h1(), 0.0), (0.0, h / m.h2())]
        .iter()
        .map(|&(dx, dy)| {
            let a = end(Point::new(x0.x + dx, x0.y + dy));
            let b = end(Point::new(x0.x - dx, x0.y - dy));
            [0, 1, 2].map(|d| (a[d] - b[d]) / (2.0 * h))
        })
        .collect();
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (a, b, c) = (dot(&cols[0], &cols[0]), dot(&cols[0], &cols[1]), dot(&cols[1], &cols[1]));
    let lmax = 0.5 * (a + c) + (0.25 * (a - c) * (a - c) + b * b).sqrt();
    lmax.ln() / (2.0 * t)
}

/// Mean of `exp(α sin x sin y)` by the periodic trapezoid rule.
pub fn metric_mean_trapezoid(alpha: f64, n: usize) -> f64 {
    let h = std::f64::consts::TAU / n as f64;
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            s += (alpha * (i as f64 * h).sin() * (j as f64 * h).sin()).exp();
        }
    }
    s / (n * n) as f64
}

/// `Σ_{n even} αⁿ/n! · 4⁻ⁿ · C(n, n/2)²` by direct products.
pub fn a00_series_direct(alpha: f64) -> f64 {
    let mut total = 0.0;
    for n in (0..60).step_by(2) {
        let mut term = 1.0;
        for i in 1..=n {
            term *= alpha / (4.0 * i as f64);
        }
        let mut c = 1.0;
        for i in 0..n / 2 {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        total += term * c * c;
    }
    total
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
