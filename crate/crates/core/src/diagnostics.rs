//! Covariant velocity gradient, pressure Hessian, the strain acceleration
//! tensor `M = -H(p) - R(·,u)u + ᵗ(∇u)(∇u)` and Haller-type classification.
//!
//! Frame convention: `grad.m_ab = ⟨∇_{e_b} u, e_a⟩`, so the vorticity is
//! `m21 - m12` and `∇_ξ u = grad · ξ`.

use crate::autodiff::{Scalar, Taylor1, Taylor2};
use crate::error::{Error, Result};
use crate::geometry::{metric_at, Chart, FrameVector, MetricData, Point};
pub use crate::tensor::FrameTensor2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowSource {
    Analytic,
    Grid,
}

/// A velocity field on a chart, sampled in frame components.
pub trait VelocitySampler: Sync {
    fn chart(&self) -> Chart;
    fn source(&self) -> FlowSource;
    fn is_steady(&self) -> bool;
    fn velocity(&self, p: Point) -> Result<FrameVector>;
    /// Frame components `[u, v]` with their coordinate gradients.
    fn jet(&self, p: Point) -> Result<[Taylor1; 2]>;
    /// Frame components with coordinate gradients and Hessians.
    fn jet2(&self, _p: Point) -> Result<[Taylor2; 2]> {
        Err(Error::Usage("second derivatives are only available for closed-form flows".into()))
    }
    /// Points where the field is not smooth and tensors are not reported.
    fn flagged(&self, _p: Point) -> bool {
        false
    }
}

/// Closed-form flow, written once over [`Scalar`] so that derivatives are exact.
pub trait AnalyticFlow: Sync {
    fn chart(&self) -> Chart;
    /// Frame components `[u, v]` at chart coordinates `(x, y)`.
    fn eval<T: Scalar>(&self, x: T, y: T) -> [T; 2];
    fn flagged(&self, _p: Point) -> bool {
        false
    }
}

impl<F: AnalyticFlow> VelocitySampler for F {
    fn chart(&self) -> Chart {
        AnalyticFlow::chart(self)
    }
    fn source(&self) -> FlowSource {
        FlowSource::Analytic
    }
    fn is_steady(&self) -> bool {
        true
    }
    fn velocity(&self, p: Point) -> Result<FrameVector> {
        let p = AnalyticFlow::chart(self).validate(p)?;
        let [u, v] = self.eval(p.x, p.y);
        Ok(FrameVector::new(u, v))
    }
    fn jet(&self, p: Point) -> Result<[Taylor1; 2]> {
        let p = AnalyticFlow::chart(self).validate(p)?;
        Ok(self.eval(Taylor1::var(p.x, 0), Taylor1::var(p.y, 1)))
    }
    fn jet2(&self, p: Point) -> Result<[Taylor2; 2]> {
        let p = AnalyticFlow::chart(self).validate(p)?;
        Ok(self.eval(Taylor2::var(p.x, 0), Taylor2::var(p.y, 1)))
    }
    fn flagged(&self, p: Point) -> bool {
        AnalyticFlow::flagged(self, p)
    }
}

/// Frame gradient of a vector field from its frame components and their
/// coordinate derivatives.
pub fn frame_gradient(m: &MetricData, u: Taylor1, v: Taylor1) -> FrameTensor2 {
    let (a, b) = m.frame_connection();
    let (h1, h2) = (m.h1(), m.h2());
    FrameTensor2::new(
        u.d[0] / h1 + a * v.v,
        u.d[1] / h2 - b * v.v,
        v.d[0] / h1 - a * u.v,
        v.d[1] / h2 + b * u.v,
    )
}

pub fn velocity_gradient<S: VelocitySampler + ?Sized>(sampler: &S, p: Point) -> Result<FrameTensor2> {
    let m = metric_at(&sampler.chart(), p)?;
    let [u, v] = sampler.jet(p)?;
    Ok(frame_gradient(&m, u, v))
}

pub fn rate_of_strain(grad: &FrameTensor2) -> FrameTensor2 {
    grad.symmetric()
}

pub fn vorticity(grad: &FrameTensor2) -> f64 {
    grad.m21 - grad.m12
}

/// `Q = ½(|S|² − |Ω|²)`.
pub fn okubo_weiss(grad: &FrameTensor2) -> f64 {
    0.5 * (grad.symmetric().frobenius_sq() - grad.antisymmetric().frobenius_sq())
}

/// `H(p) = −∇(∇_u u)`, valid for steady Euler solutions.
pub fn pressure_hessian_steady<S: VelocitySampler + ?Sized>(sampler: &S, p: Point) -> Result<FrameTensor2> {
    if !sampler.is_steady() {
        return Err(Error::Usage("steady pressure Hessian requested for an unsteady field".into()));
    }
    let chart = sampler.chart();
    let p = chart.validate(p)?;
    let [u2, v2] = sampler.jet2(p)?;
    let (h1, h2) = chart.scale_factors(Taylor2::var(p.x, 0), Taylor2::var(p.y, 1));
    let (h1f, h2f) = (h1.first(), h2.first());
    let a = h1.partial(1) / (h1f * h2f);
    let b = h2.partial(0) / (h1f * h2f);
    let (u, v) = (u2.first(), v2.first());
    let e1u = u2.partial(0) / h1f;
    let e2u = u2.partial(1) / h2f;
    let e1v = v2.partial(0) / h1f;
    let e2v = v2.partial(1) / h2f;
    // W = ∇_u u in frame components; grad p = −W.
    let w1 = u * e1u + v * e2u + a * u * v - b * v * v;
    let w2 = u * e1v + v * e2v - a * u * u + b * u * v;
    let m = metric_at(&chart, p)?;
    Ok(frame_gradient(&m, -w1, -w2))
}

/// `R₁₂₂₁ [[v², −uv], [−uv, u²]]`, whose quadratic form is `⟨R(ξ,u)u, ξ⟩`.
pub fn curvature_term(chart: &Chart, p: Point, u: FrameVector) -> Result<FrameTensor2> {
    let r = metric_at(chart, p)?.r1221;
    Ok(curvature_tensor(r, u))
}

fn curvature_tensor(r: f64, u: FrameVector) -> FrameTensor2 {
    let uv = -u.c1 * u.c2;
    FrameTensor2::new(r * u.c2 * u.c2, r * uv, r * uv, r * u.c1 * u.c1)
}

/// The three contributions to `M`, each with the sign it enters with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainAcceleration {
    /// `−H(p)`
    pub pressure: FrameTensor2,
    /// `−R(·,u)u`
    pub curvature: FrameTensor2,
    /// `ᵗ(∇u)(∇u)`
    pub gradient: FrameTensor2,
}

impl StrainAcceleration {
    pub fn total(&self) -> FrameTensor2 {
        self.pressure.add(&self.curvature).add(&self.gradient)
    }

    pub fn without_curvature(&self) -> FrameTensor2 {
        self.pressure.add(&self.gradient)
    }
}

pub fn strain_acceleration_parts<S: VelocitySampler + ?Sized>(
    chart: &Chart,
    p: Point,
    sampler: &S,
    hess: &FrameTensor2,
) -> Result<StrainAcceleration> {
    let grad = velocity_gradient(sampler, p)?;
    let u = sampler.velocity(p)?;
    Ok(StrainAcceleration {
        pressure: hess.scale(-1.0),
        curvature: curvature_term(chart, p, u)?.scale(-1.0),
        gradient: grad.transpose().matmul(&grad),
    })
}

pub fn strain_acceleration<S: VelocitySampler + ?Sized>(
    chart: &Chart,
    p: Point,
    sampler: &S,
    hess: &FrameTensor2,
) -> Result<FrameTensor2> {
    Ok(strain_acceleration_parts(chart, p, sampler, hess)?.total())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainEigen {
    pub lambda: f64,
    pub e_plus: FrameVector,
    pub e_minus: FrameVector,
}

pub fn strain_eigen(strain: &FrameTensor2) -> StrainEigen {
    let e = strain.sym_eigen();
    // Traceless up to round-off; split the residual trace evenly.
    StrainEigen { lambda: 0.5 * (e.values[1] - e.values[0]), e_plus: e.vectors[1], e_minus: e.vectors[0] }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HyperbolicClass {
    Hyperbolic,
    StrongHyperbolic,
    Elliptic,
    Degenerate,
}

impl HyperbolicClass {
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, HyperbolicClass::Hyperbolic | HyperbolicClass::StrongHyperbolic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicVerdict {
    pub class: HyperbolicClass,
    /// `⟨Mξ,ξ⟩` for `ξ = e₊ + e₋` and `ξ = e₊ − e₋`.
    pub m_on_z: [f64; 2],
    pub det_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub include_curvature: bool,
    /// `|det S| < degeneracy_rel · |∇u|²` counts as `S = 0`.
    pub degeneracy_rel: f64,
    /// Values above `−positivity_rel · scale(M)` count as positive; zero
    /// recovers the strict test.
    pub positivity_rel: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { include_curvature: true, degeneracy_rel: 1e-10, positivity_rel: 1e-12 }
    }
}

impl ClassifyOptions {
    pub fn without_curvature() -> Self {
        Self { include_curvature: false, ..Self::default() }
    }
}

/// Classification from precomputed local data. Both curvature settings see
/// identical thresholds, and the curvature contribution is subtracted last,
/// so the with-curvature hyperbolic set is contained in the other one exactly
/// on a sphere.
pub fn classify_local(
    u: FrameVector,
    grad: &FrameTensor2,
    hess: &FrameTensor2,
    r1221: f64,
    flagged: bool,
    opts: &ClassifyOptions,
) -> HyperbolicVerdict {
    let s = grad.symmetric();
    let det_s = s.det();
    let gtg = grad.transpose().matmul(grad);
    let base = gtg.sub(hess);
    let degenerate = flagged || det_s.abs() < opts.degeneracy_rel * (grad.frobenius_sq() + f64::MIN_POSITIVE);
    let e = strain_eigen(&s);
    let m_on = |xi: FrameVector| {
        let b = base.quad(xi);
        if opts.include_curvature {
            let w = xi.c1 * u.c2 - xi.c2 * u.c1;
            b - r1221 * w * w
        } else {
            b
        }
    };
    let m_on_z = [m_on(e.e_plus.add(e.e_minus)), m_on(e.e_plus.sub(e.e_minus))];
    let class = if degenerate {
        HyperbolicClass::Degenerate
    } else {
        let scale = hess.frobenius() + gtg.frobenius() + r1221.abs() * u.norm_sq();
        let tol = -opts.positivity_rel * scale;
        if m_on_z.iter().all(|&m| m > tol) {
            let m = if opts.include_curvature { base.sub(&curvature_tensor(r1221, u)) } else { base };
            if m.sym_eigen().values[0] > tol {
                HyperbolicClass::StrongHyperbolic
            } else {
                HyperbolicClass::Hyperbolic
            }
        } else {
            HyperbolicClass::Elliptic
        }
    };
    HyperbolicVerdict { class, m_on_z, det_s }
}

pub fn classify<S: VelocitySampler + ?Sized>(
    chart: &Chart,
    p: Point,
    sampler: &S,
    hess: &FrameTensor2,
    opts: &ClassifyOptions,
) -> Result<HyperbolicVerdict> {
    let grad = velocity_gradient(sampler, p)?;
    let u = sampler.velocity(p)?;
    let r = metric_at(chart, p)?.r1221;
    Ok(classify_local(u, &grad, hess, r, sampler.flagged(p), opts))
}

/// Classification of a steady field, computing `H(p)` on the way.
pub fn classify_steady<S: VelocitySampler + ?Sized>(
    sampler: &S,
    p: Point,
    opts: &ClassifyOptions,
) -> Result<HyperbolicVerdict> {
    let hess = pressure_hessian_steady(sampler, p)?;
    classify(&sampler.chart(), p, sampler, &hess, opts)
}
