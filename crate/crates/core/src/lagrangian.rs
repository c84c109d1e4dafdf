//! Particle paths, material tangents, FTLE, hyperbolicity times and material
//! lines.
//!
//! On the sphere the state lives in the 3-D embedding, so trajectories may
//! pass anywhere except exactly through a pole. On the other charts the state
//! is the coordinate pair plus frame components of the tangents, which rotate
//! with the frame along the path.

use rayon::prelude::*;

use crate::autodiff::Taylor1;
use crate::diagnostics::{
    classify_local, frame_gradient, pressure_hessian_steady, velocity_gradient, ClassifyOptions, HyperbolicClass,
    VelocitySampler,
};
use crate::error::{Error, Result};
use crate::geometry::{metric_at, Chart, ChartKind, FrameVector, Point};

/// A possibly time-dependent velocity field.
pub trait Flow: Sync {
    fn chart(&self) -> Chart;
    fn velocity_at(&self, p: Point, t: f64) -> Result<FrameVector>;
    fn jet_at(&self, p: Point, t: f64) -> Result<[Taylor1; 2]>;
}

/// Adapter presenting a steady sampler as a [`Flow`].
pub struct Steady<'a, S: ?Sized>(pub &'a S);

impl<S: VelocitySampler + ?Sized> Flow for Steady<'_, S> {
    fn chart(&self) -> Chart {
        self.0.chart()
    }
    fn velocity_at(&self, p: Point, _t: f64) -> Result<FrameVector> {
        self.0.velocity(p)
    }
    fn jet_at(&self, p: Point, _t: f64) -> Result<[Taylor1; 2]> {
        self.0.jet(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, Point)>,
    pub dt: f64,
    pub scheme: &'static str,
}

impl Trajectory {
    pub fn last(&self) -> Point {
        self.samples.last().expect("trajectories are never empty").1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentState {
    pub t: f64,
    pub xi: FrameVector,
}

const MAX_TANGENTS: usize = 2;
type State = [f64; 9];

/// Unit embedding of `(λ, μ)` and the frame there.
pub fn sphere_embed(p: Point) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (s, c) = p.x.sin_cos();
    let r = (1.0 - p.y * p.y).max(0.0).sqrt();
    ([r * c, r * s, p.y], [-s, c, 0.0], [-p.y * c, -p.y * s, r])
}

fn sphere_coords(x: &[f64]) -> Point {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    Point::new(x[1].atan2(x[0]).rem_euclid(std::f64::consts::TAU), x[2] / n)
}

fn dot3(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

struct Engine<'a, F: Flow + ?Sized> {
    flow: &'a F,
    chart: Chart,
    embedded: bool,
    ntan: usize,
}

impl<'a, F: Flow + ?Sized> Engine<'a, F> {
    fn new(flow: &'a F, ntan: usize) -> Self {
        let chart = flow.chart();
        Self { flow, chart, embedded: chart.kind() == ChartKind::Sphere, ntan }
    }

    fn pack(&self, p: Point, tangents: &[FrameVector]) -> Result<State> {
        let mut s = [0.0; 9];
        if self.embedded {
            let p = self.chart.validate(p)?;
            let (x, e1, e2) = sphere_embed(p);
            s[..3].copy_from_slice(&x);
            for (k, t) in tangents.iter().enumerate() {
                for d in 0..3 {
                    s[3 + 3 * k + d] = t.c1 * e1[d] + t.c2 * e2[d];
                }
            }
        } else {
            self.chart.validate(p)?;
            s[0] = p.x;
            s[1] = p.y;
            for (k, t) in tangents.iter().enumerate() {
                s[2 + 2 * k] = t.c1;
                s[3 + 2 * k] = t.c2;
            }
        }
        Ok(s)
    }

    fn point(&self, s: &State) -> Point {
        if self.embedded {
            sphere_coords(&s[..3])
        } else {
            Point::new(s[0], s[1])
        }
    }

    fn tangents(&self, s: &State) -> Vec<FrameVector> {
        (0..self.ntan)
            .map(|k| {
                if self.embedded {
                    let (_, e1, e2) = sphere_embed(sphere_coords(&s[..3]));
                    let xi = &s[3 + 3 * k..6 + 3 * k];
                    FrameVector::new(dot3(xi, &e1), dot3(xi, &e2))
                } else {
                    FrameVector::new(s[2 + 2 * k], s[3 + 2 * k])
                }
            })
            .collect()
    }

    /// `|ξ_a · ξ_b|` Gram entries in the metric.
    fn gram(&self, s: &State) -> [[f64; 2]; 2] {
        let mut g = [[0.0; 2]; 2];
        for a in 0..self.ntan {
            for b in 0..self.ntan {
                g[a][b] = if self.embedded {
                    dot3(&s[3 + 3 * a..6 + 3 * a], &s[3 + 3 * b..6 + 3 * b])
                } else {
                    s[2 + 2 * a] * s[2 + 2 * b] + s[3 + 2 * a] * s[3 + 2 * b]
                };
            }
        }
        g
    }

    fn deriv(&self, t: f64, s: &State) -> Result<State> {
        let p = self.point(s);
        let mut out = [0.0; 9];
        let m = metric_at(&self.chart, p)?;
        let (u, grad) = if self.ntan == 0 {
            (self.flow.velocity_at(p, t)?, None)
        } else {
            let [u, v] = self.flow.jet_at(p, t)?;
            (FrameVector::new(u.v, v.v), Some(frame_gradient(&m, u, v)))
        };
        if self.embedded {
            let (_, e1, e2) = sphere_embed(p);
            let xdot: Vec<f64> = (0..3).map(|d| u.c1 * e1[d] + u.c2 * e2[d]).collect();
            out[..3].copy_from_slice(&xdot);
            if let Some(g) = grad {
                let x = &s[..3];
                let nx = dot3(x, x).sqrt();
                for k in 0..self.ntan {
                    let xi = &s[3 + 3 * k..6 + 3 * k];
                    let gx = g.apply(FrameVector::new(dot3(xi, &e1), dot3(xi, &e2)));
                    let ux = dot3(&xdot, xi);
                    for d in 0..3 {
                        out[3 + 3 * k + d] = gx.c1 * e1[d] + gx.c2 * e2[d] - ux * x[d] / nx;
                    }
                }
            }
        } else {
            out[0] = u.c1 / m.h1();
            out[1] = u.c2 / m.h2();
            if let Some(g) = grad {
                let (a, b) = m.frame_connection();
                let w = a * u.c1 - b * u.c2;
                for k in 0..self.ntan {
                    let xi = FrameVector::new(s[2 + 2 * k], s[3 + 2 * k]);
                    let gx = g.apply(xi);
                    out[2 + 2 * k] = gx.c1 - w * xi.c2;
                    out[3 + 2 * k] = gx.c2 + w * xi.c1;
                }
            }
        }
        Ok(out)
    }

    /// One RK4 step; also returns the stage-two position.
    fn step(&self, t: f64, s: &State, dt: f64) -> Result<(State, Point)> {
        let axpy = |a: &State, k: &State, h: f64| {
            let mut r = *a;
            for (ri, ki) in r.iter_mut().zip(k) {
                *ri += h * ki;
            }
            r
        };
        let k1 = self.deriv(t, s)?;
        let s2 = axpy(s, &k1, 0.5 * dt);
        let k2 = self.deriv(t + 0.5 * dt, &s2)?;
        let k3 = self.deriv(t + 0.5 * dt, &axpy(s, &k2, 0.5 * dt))?;
        let k4 = self.deriv(t + dt, &axpy(s, &k3, dt))?;
        let mut r = *s;
        for i in 0..9 {
            r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if self.embedded {
            let n = dot3(&r[..3], &r[..3]).sqrt();
            for v in r[..3].iter_mut() {
                *v /= n;
            }
            let x = [r[0], r[1], r[2]];
            for k in 0..self.ntan {
                let o = 3 + 3 * k;
                let c = dot3(&r[o..o + 3], &x);
                for d in 0..3 {
                    r[o + d] -= c * x[d];
                }
            }
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite state at t={}", t + dt)));
        }
        let mid = self.point(&s2);
        Ok((r, mid))
    }
}

/// Number of RK4 steps and the signed step that exactly cover `[t0, t1]`.
fn steps_for(t0: f64, t1: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite() && t0.is_finite() && t1.is_finite()) {
        return Err(Error::Usage(format!("invalid time stepping t0={t0}, t1={t1}, dt={dt}")));
    }
    let span = t1 - t0;
    let n = (span.abs() / dt).round().max(1.0) as usize;
    Ok((n, span / n as f64))
}

fn run<F: Flow + ?Sized>(
    flow: &F,
    x0: Point,
    tangents: &[FrameVector],
    t0: f64,
    t1: f64,
    dt: f64,
    mut observe: impl FnMut(f64, &Engine<'_, F>, &State, Point),
) -> Result<()> {
    assert!(tangents.len() <= MAX_TANGENTS);
    let eng = Engine::new(flow, tangents.len());
    let (n, h) = steps_for(t0, t1, dt)?;
    let mut s = eng.pack(x0, tangents)?;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let (next, mid) = eng.step(t, &s, h)?;
        s = next;
        observe(t0 + (i + 1) as f64 * h, &eng, &s, mid);
    }
    Ok(())
}

/// RK4 particle path sampled at every step.
pub fn advect<S: VelocitySampler + ?Sized>(sampler: &S, x0: Point, t0: f64, t1: f64, dt: f64) -> Result<Trajectory> {
    let x0 = sampler.chart().validate(x0).map(|p| if sampler.chart().kind() == ChartKind::ConformalTorus { x0 } else { p })?;
    let mut samples = vec![(t0, x0)];
    let mut step = 0.0;
    run(&Steady(sampler), x0, &[], t0, t1, dt, |t, eng, s, _| {
        samples.push((t, eng.point(s)));
    })?;
    if samples.len() > 1 {
        step = samples[1].0 - samples[0].0;
    }
    Ok(Trajectory { samples, dt: step.abs(), scheme: "rk4" })
}

/// Material tangent along the trajectory, `Dξ/dt = ∇_ξ u`.
pub fn propagate_tangent<S: VelocitySampler + ?Sized>(
    sampler: &S,
    traj: &Trajectory,
    xi0: FrameVector,
) -> Result<Vec<TangentState>> {
    let (t0, x0) = traj.samples[0];
    let t1 = traj.samples.last().map(|s| s.0).unwrap_or(t0);
    let mut out = vec![TangentState { t: t0, xi: xi0 }];
    if t1 == t0 {
        return Ok(out);
    }
    run(&Steady(sampler), x0, &[xi0], t0, t1, traj.dt, |t, eng, s, _| {
        out.push(TangentState { t, xi: eng.tangents(s)[0] });
    })?;
    Ok(out)
}

/// Tangent at `t1` for a path started at `x0` with tangent `xi0` at `t0`.
/// `t1 < t0` integrates backwards.
pub fn tangent_at<F: Flow + ?Sized>(flow: &F, x0: Point, xi0: FrameVector, t0: f64, t1: f64, dt: f64) -> Result<FrameVector> {
    let mut last = xi0;
    run(flow, x0, &[xi0], t0, t1, dt, |_, eng, s, _| last = eng.tangents(s)[0])?;
    Ok(last)
}

/// Largest eigenvalue of a symmetric 2×2 matrix.
fn lambda_max(g: [[f64; 2]; 2]) -> f64 {
    let m = 0.5 * (g[0][0] + g[1][1]);
    let d = 0.5 * (g[0][0] - g[1][1]);
    m + d.hypot(0.5 * (g[0][1] + g[1][0]))
}

/// `(1/2T) ln λ_max` of the Cauchy–Green tensor of the time-`T` flow map.
pub fn ftle<S: VelocitySampler + ?Sized>(sampler: &S, x0: Point, t_final: f64, dt: f64) -> Result<f64> {
    ftle_flow(&Steady(sampler), x0, 0.0, t_final, dt)
}

pub fn ftle_flow<F: Flow + ?Sized>(flow: &F, x0: Point, t0: f64, t_final: f64, dt: f64) -> Result<f64> {
    if t_final <= 0.0 {
        return Err(Error::Usage("FTLE needs T > 0".into()));
    }
    let basis = [FrameVector::new(1.0, 0.0), FrameVector::new(0.0, 1.0)];
    let mut gram = [[1.0, 0.0], [0.0, 1.0]];
    run(flow, x0, &basis, t0, t0 + t_final, dt, |_, eng, s, _| gram = eng.gram(s))?;
    Ok(lambda_max(gram).ln() / (2.0 * t_final))
}

/// One hyperbolicity-time variant: classification options and whether the
/// strong (positive definite) test is required.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypVariant {
    pub opts: ClassifyOptions,
    pub strong: bool,
}

/// Time spent in the (strong) hyperbolic domain over `[0, T]`, sampled at the
/// stage-two point of every RK4 step. Several variants share one trajectory.
pub fn hyperbolicity_times<S: VelocitySampler + ?Sized>(
    sampler: &S,
    x0: Point,
    t_final: f64,
    dt: f64,
    variants: &[HypVariant],
) -> Result<Vec<f64>> {
    if !sampler.is_steady() {
        return Err(Error::Usage("hyperbolicity time needs a steady field".into()));
    }
    let chart = sampler.chart();
    let mut acc = vec![0.0; variants.len()];
    let (_, h) = steps_for(0.0, t_final, dt)?;
    let mut err = None;
    run(&Steady(sampler), x0, &[], 0.0, t_final, dt, |_, _, _, mid| {
        if err.is_some() {
            return;
        }
        let local = (|| -> Result<_> {
            let grad = velocity_gradient(sampler, mid)?;
            let hess = pressure_hessian_steady(sampler, mid)?;
            let u = sampler.velocity(mid)?;
            let r = metric_at(&chart, mid)?.r1221;
            Ok((grad, hess, u, r))
        })();
        match local {
            Ok((grad, hess, u, r)) => {
                for (a, v) in acc.iter_mut().zip(variants) {
                    let c = classify_local(u, &grad, &hess, r, sampler.flagged(mid), &v.opts).class;
                    let hit = if v.strong { c == HyperbolicClass::StrongHyperbolic } else { c.is_hyperbolic() };
                    if hit {
                        *a += h;
                    }
                }
            }
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

pub fn hyperbolicity_time<S: VelocitySampler + ?Sized>(
    sampler: &S,
    x0: Point,
    t_final: f64,
    dt: f64,
    opts: ClassifyOptions,
    strong: bool,
) -> Result<f64> {
    Ok(hyperbolicity_times(sampler, x0, t_final, dt, &[HypVariant { opts, strong }])?[0])
}

/// Row-major `(nx × ny)` map over seeds, evaluated in parallel.
pub fn seed_grid(nx: usize, ny: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Vec<Point> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = y_range.0 + (j as f64 + 0.5) * (y_range.1 - y_range.0) / ny as f64;
        for i in 0..nx {
            out.push(Point::new(x_range.0 + (i as f64 + 0.5) * (x_range.1 - x_range.0) / nx as f64, y));
        }
    }
    out
}

pub fn map_seeds<T: Send>(seeds: &[Point], f: impl Fn(Point) -> Result<T> + Sync) -> Result<Vec<T>> {
    seeds.par_iter().map(|&p| f(p)).collect()
}

/// One RK4 step for a set of points (no tangents).
pub fn advance_points<F: Flow + ?Sized>(flow: &F, pts: &mut [Point], t: f64, dt: f64) -> Result<()> {
    let eng = Engine::new(flow, 0);
    for p in pts.iter_mut() {
        let s = eng.pack(*p, &[])?;
        let (next, _) = eng.step(t, &s, dt)?;
        *p = eng.point(&next);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLine {
    pub nodes: Vec<Point>,
    pub s0: f64,
    pub ds: f64,
}

/// Line of parameter length `s0` through `x0`, normal to the velocity,
/// represented by `segments + 1` nodes.
pub fn init_material_line<S: VelocitySampler + ?Sized>(
    sampler: &S,
    x0: Point,
    s0: f64,
    segments: usize,
) -> Result<MaterialLine> {
    if segments == 0 {
        return Err(Error::Usage("a material line needs at least one segment".into()));
    }
    let chart = sampler.chart();
    let ds = s0 / segments as f64;
    let dir = |p: Point| -> Result<[f64; 2]> {
        let u = sampler.velocity(p)?;
        let n = u.norm();
        if n < 1e-12 {
            return Err(Error::DegenerateDirection(format!("stagnation point near ({}, {})", p.x, p.y)));
        }
        let m = metric_at(&chart, p)?;
        Ok(m.frame_to_coords(u.perp().scale(1.0 / n)))
    };
    let mut nodes = vec![x0];
    let mut p = x0;
    for _ in 0..segments {
        let at = |p: Point, k: [f64; 2], h: f64| Point::new(p.x + h * k[0], p.y + h * k[1]);
        let k1 = dir(p)?;
        let k2 = dir(at(p, k1, 0.5 * ds))?;
        let k3 = dir(at(p, k2, 0.5 * ds))?;
        let k4 = dir(at(p, k3, ds))?;
        p = Point::new(
            p.x + ds / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            p.y + ds / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        );
        nodes.push(p);
    }
    Ok(MaterialLine { nodes, s0, ds })
}

/// `½ Σ (g₁₁ Δx² + g₂₂ Δy²)/Δs` with the metric taken at the first node of
/// each segment and unwrapped coordinate differences.
pub fn material_line_energy(line: &MaterialLine, chart: &Chart) -> Result<f64> {
    let mut e = 0.0;
    for w in line.nodes.windows(2) {
        let m = metric_at(chart, w[0])?;
        let (dx, dy) = (w[1].x - w[0].x, w[1].y - w[0].y);
        e += m.g11 * dx * dx + m.g22 * dy * dy;
    }
    Ok(0.5 * e / line.ds)
}

/// Sum of segment lengths measured with the metric at segment midpoints.
pub fn material_line_length(line: &MaterialLine, chart: &Chart) -> Result<f64> {
    let mut l = 0.0;
    for w in line.nodes.windows(2) {
        let mid = Point::new(0.5 * (w[0].x + w[1].x), 0.5 * (w[0].y + w[1].y));
        let m = metric_at(chart, mid)?;
        let (dx, dy) = (w[1].x - w[0].x, w[1].y - w[0].y);
        l += (m.g11 * dx * dx + m.g22 * dy * dy).sqrt();
    }
    Ok(l)
}
