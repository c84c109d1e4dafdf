//! Coordinate charts: unit sphere in (λ, μ = sin latitude), the conformally
//! curved torus g = exp(α sin x sin y), and the Poincaré disk.
//!
//! All three metrics are diagonal, `ds² = h1² dx² + h2² dy²`. Tensors live in
//! the orthonormal frame `e_a = ∂_a / h_a`, so frame components carry no
//! metric factors.

use std::f64::consts::TAU;

use crate::autodiff::Scalar;
use crate::error::{Error, Result};

/// Sphere points closer than this to a pole are rejected.
pub const POLE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    Sphere,
    ConformalTorus,
    PoincareDisk,
}

impl ChartKind {
    pub fn name(self) -> &'static str {
        match self {
            ChartKind::Sphere => "sphere",
            ChartKind::ConformalTorus => "conformal-torus",
            ChartKind::PoincareDisk => "poincare-disk",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sphere" => Some(ChartKind::Sphere),
            "conformal-torus" => Some(ChartKind::ConformalTorus),
            "poincare-disk" => Some(ChartKind::PoincareDisk),
            _ => None,
        }
    }
}

/// A chart together with its parameters. Only the torus has one (α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    kind: ChartKind,
    alpha: f64,
}

impl Chart {
    pub const fn sphere() -> Self {
        Self { kind: ChartKind::Sphere, alpha: 0.0 }
    }

    /// `alpha = 0` is accepted and gives the flat torus.
    pub fn torus(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Usage(format!("torus alpha must be finite and >= 0, got {alpha}")));
        }
        Ok(Self { kind: ChartKind::ConformalTorus, alpha })
    }

    pub const fn disk() -> Self {
        Self { kind: ChartKind::PoincareDisk, alpha: 0.0 }
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Checks the point and, on the torus, reduces it into `[0, 2π)²`.
    pub fn validate(&self, p: Point) -> Result<Point> {
        let bad = || Error::Domain { chart: self.name(), x: p.x, y: p.y };
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(bad());
        }
        match self.kind {
            ChartKind::Sphere => {
                if p.y.abs() >= 1.0 - POLE_MARGIN {
                    return Err(bad());
                }
                Ok(p)
            }
            ChartKind::ConformalTorus => Ok(Point::new(p.x.rem_euclid(TAU), p.y.rem_euclid(TAU))),
            ChartKind::PoincareDisk => {
                if p.x * p.x + p.y * p.y >= 1.0 {
                    return Err(bad());
                }
                Ok(p)
            }
        }
    }

    /// Scale factors `(h1, h2)` for generic scalars, so derivatives come for free.
    pub fn scale_factors<T: Scalar>(&self, x: T, y: T) -> (T, T) {
        match self.kind {
            ChartKind::Sphere => {
                let c = (-(y * y) + 1.0).sqrt();
                (c, c.recip())
            }
            ChartKind::ConformalTorus => {
                let h = (x.sin() * y.sin() * (0.5 * self.alpha)).exp();
                (h, h)
            }
            ChartKind::PoincareDisk => {
                let h = (-(x * x + y * y) + 1.0).recip() * 2.0;
                (h, h)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Components with respect to the orthonormal frame at some point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector {
    pub c1: f64,
    pub c2: f64,
}

impl FrameVector {
    pub const fn new(c1: f64, c2: f64) -> Self {
        Self { c1, c2 }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.c1 * o.c1 + self.c2 * o.c2
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.c1.hypot(self.c2)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.c1 * s, self.c2 * s)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.c1 + o.c1, self.c2 + o.c2)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.c1 - o.c1, self.c2 - o.c2)
    }

    /// Rotation by +90°: (c1, c2) -> (-c2, c1).
    pub fn perp(self) -> Self {
        Self::new(-self.c2, self.c1)
    }
}

/// Metric, Levi-Civita connection and curvature at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricData {
    pub g11: f64,
    pub g22: f64,
    pub sqrt_g: f64,
    /// `christoffel[k][i][j]` is Γᵏᵢⱼ; symmetric in `i, j`.
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub r1221: f64,
}

impl MetricData {
    pub fn h1(&self) -> f64 {
        self.g11.sqrt()
    }

    pub fn h2(&self) -> f64 {
        self.g22.sqrt()
    }

    /// Frame rotation coefficients `a = ∂₂h1/(h1 h2)`, `b = ∂₁h2/(h1 h2)`.
    ///
    /// With these, `∇_{e1} e1 = -a e2`, `∇_{e2} e2 = -b e1`,
    /// `∇_{e1} e2 = a e1` and `∇_{e2} e1 = b e2`.
    pub fn frame_connection(&self) -> (f64, f64) {
        // Γ¹₁₂ = ∂₂h1/h1 and Γ²₁₂ = ∂₁h2/h2 for diagonal metrics.
        let g = &self.christoffel;
        (g[0][0][1] / self.h2(), g[1][0][1] / self.h1())
    }

    pub fn frame_to_coords(&self, v: FrameVector) -> [f64; 2] {
        [v.c1 / self.h1(), v.c2 / self.h2()]
    }

    pub fn coords_to_frame(&self, c: [f64; 2]) -> FrameVector {
        FrameVector::new(c[0] * self.h1(), c[1] * self.h2())
    }
}

fn conformal(g: f64, phi_x: f64, phi_y: f64, r1221: f64) -> MetricData {
    let mut c = [[[0.0; 2]; 2]; 2];
    c[0][0][0] = phi_x;
    c[0][0][1] = phi_y;
    c[0][1][0] = phi_y;
    c[0][1][1] = -phi_x;
    c[1][0][0] = -phi_y;
    c[1][0][1] = phi_x;
    c[1][1][0] = phi_x;
    c[1][1][1] = phi_y;
    MetricData { g11: g, g22: g, sqrt_g: g, christoffel: c, r1221 }
}

pub fn metric_at(chart: &Chart, p: Point) -> Result<MetricData> {
    let p = chart.validate(p)?;
    Ok(match chart.kind {
        ChartKind::Sphere => {
            let mu = p.y;
            let c2 = 1.0 - mu * mu;
            let mut c = [[[0.0; 2]; 2]; 2];
            c[0][0][1] = -mu / c2;
            c[0][1][0] = -mu / c2;
            c[1][0][0] = mu * c2;
            c[1][1][1] = mu / c2;
            MetricData { g11: c2, g22: 1.0 / c2, sqrt_g: 1.0, christoffel: c, r1221: 1.0 }
        }
        ChartKind::ConformalTorus => {
            let a = chart.alpha;
            let (sx, cx) = p.x.sin_cos();
            let (sy, cy) = p.y.sin_cos();
            let s = a * sx * sy;
            conformal(s.exp(), 0.5 * a * cx * sy, 0.5 * a * sx * cy, s * (-s).exp())
        }
        ChartKind::PoincareDisk => {
            let w = 1.0 - p.x * p.x - p.y * p.y;
            let g = 4.0 / (w * w);
            conformal(g, 2.0 * p.x / w, 2.0 * p.y / w, -1.0)
        }
    })
}

pub fn curvature_at(chart: &Chart, p: Point) -> Result<f64> {
    Ok(metric_at(chart, p)?.r1221)
}

/// First-order coordinate step of length `h·|v|` in frame direction `v`.
pub fn geodesic_normal_step(chart: &Chart, p: Point, v: FrameVector, h: f64) -> Result<Point> {
    let m = metric_at(chart, p)?;
    let d = m.frame_to_coords(v);
    chart.validate(Point::new(p.x + h * d[0], p.y + h * d[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Taylor1;

    fn charts() -> [Chart; 3] {
        [Chart::sphere(), Chart::torus(1.8).unwrap(), Chart::disk()]
    }

    fn metric_fd(chart: &Chart, p: Point) -> [[f64; 2]; 2] {
        // ∂_k g_ii by central differences, indexed [i][k].
        let h = 1e-6;
        let g = |x: f64, y: f64| {
            let m = metric_at(chart, Point::new(x, y)).unwrap();
            [m.g11, m.g22]
        };
        let (xp, xm) = (g(p.x + h, p.y), g(p.x - h, p.y));
        let (yp, ym) = (g(p.x, p.y + h), g(p.x, p.y - h));
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            out[i][0] = (xp[i] - xm[i]) / (2.0 * h);
            out[i][1] = (yp[i] - ym[i]) / (2.0 * h);
        }
        out
    }

    #[test]
    fn christoffels_follow_levi_civita() {
        let pts = [Point::new(0.3, 0.4), Point::new(0.5, -0.6), Point::new(-0.1, 0.2)];
        for chart in charts() {
            for &p in &pts {
                let m = metric_at(&chart, p).unwrap();
                let dg = metric_fd(&chart, p);
                let gd = [m.g11, m.g22];
                // Diagonal metric: Γᵏᵢⱼ = ½ g^kk (∂ᵢ g_kj + ∂ⱼ g_ki − ∂ₖ g_ij).
                let dgij = |i: usize, j: usize, k: usize| if i == j { dg[i][k] } else { 0.0 };
                for k in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            let want = 0.5 / gd[k] * (dgij(k, j, i) + dgij(k, i, j) - dgij(i, j, k));
                            let got = m.christoffel[k][i][j];
                            assert!(
                                (got - want).abs() <= 1e-6 * (1.0 + want.abs()),
                                "{:?} Γ{k}{i}{j} {got} vs {want}",
                                chart.kind()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_values() {
        let m = metric_at(&Chart::sphere(), Point::new(0.0, 0.5)).unwrap();
        assert!((m.christoffel[1][1][1] - 0.5 / 0.75).abs() < 1e-15);
        assert!((m.christoffel[1][0][0] - 0.375).abs() < 1e-15);
        let m0 = metric_at(&Chart::sphere(), Point::new(1.0, 0.0)).unwrap();
        assert_eq!(m0.christoffel[0][0][1], 0.0);
        assert_eq!(m0.christoffel[1][0][0], 0.0);
        assert_eq!(m0.r1221, 1.0);
        assert!(metric_at(&Chart::sphere(), Point::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn torus_values() {
        let c = Chart::torus(1.8).unwrap();
        let m = metric_at(&c, Point::new(0.0, 0.0)).unwrap();
        assert!(m.christoffel.iter().flatten().flatten().all(|&v| v == 0.0));
        let r = curvature_at(&c, Point::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)).unwrap();
        assert!((r - 0.29754).abs() < 5e-6);
        assert_eq!(curvature_at(&c, Point::new(0.0, 1.3)).unwrap(), 0.0);
    }

    #[test]
    fn torus_curvature_is_minus_half_laplacian_of_log_g() {
        let c = Chart::torus(1.8).unwrap();
        let h = 1e-4;
        let lg = |x: f64, y: f64| metric_at(&c, Point::new(x, y)).unwrap().g11.ln();
        for &(x, y) in &[(0.4, 2.1), (1.0, 4.0), (5.5, 0.3)] {
            let lap = (lg(x + h, y) + lg(x - h, y) + lg(x, y + h) + lg(x, y - h) - 4.0 * lg(x, y)) / (h * h);
            let g = metric_at(&c, Point::new(x, y)).unwrap();
            let want = -0.5 / g.g11 * lap;
            assert!((g.r1221 - want).abs() < 1e-6 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn torus_curvature_extremes_on_grid() {
        let c = Chart::torus(1.8).unwrap();
        let n = 400;
        let mut lo = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let p = Point::new(TAU * i as f64 / n as f64, TAU * j as f64 / n as f64);
                lo = lo.min(curvature_at(&c, p).unwrap());
            }
        }
        assert!((lo + 1.8 * 1.8f64.exp()).abs() < 1e-3, "{lo}");
    }

    #[test]
    fn disk_values() {
        let d = Chart::disk();
        let m = metric_at(&d, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(m.g11, 4.0);
        assert_eq!(m.r1221, -1.0);
        assert!(metric_at(&d, Point::new(0.8, 0.6)).is_err());
    }

    #[test]
    fn frame_connection_matches_scale_factor_derivatives() {
        for chart in charts() {
            let p = Point::new(0.35, 0.45);
            let (h1, h2) = chart.scale_factors(Taylor1::var(p.x, 0), Taylor1::var(p.y, 1));
            let (a, b) = metric_at(&chart, p).unwrap().frame_connection();
            assert!((a - h1.d[1] / (h1.v * h2.v)).abs() < 1e-13);
            assert!((b - h2.d[0] / (h1.v * h2.v)).abs() < 1e-13);
        }
    }

    #[test]
    fn steps() {
        let flat = Chart::torus(0.0).unwrap();
        let q = geodesic_normal_step(&flat, Point::new(1.0, 1.0), FrameVector::new(1.0, 0.0), 0.1).unwrap();
        assert!((q.x - 1.1).abs() < 1e-15 && q.y == 1.0);
        for chart in charts() {
            let p = Point::new(0.2, 0.1);
            assert_eq!(geodesic_normal_step(&chart, p, FrameVector::new(0.3, 0.7), 0.0).unwrap(), p);
        }
        let s = geodesic_normal_step(&Chart::sphere(), Point::new(0.0, 0.0), FrameVector::new(0.0, 1.0), 0.01)
            .unwrap();
        assert!(s.x == 0.0 && (s.y - 0.01f64.sin()).abs() < 1e-4);
        assert!(geodesic_normal_step(&Chart::disk(), Point::new(0.9, 0.0), FrameVector::new(1.0, 0.0), 2.0).is_err());
    }
}
