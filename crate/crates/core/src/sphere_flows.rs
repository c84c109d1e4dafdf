//! Steady closed-form flows on the unit sphere in `(λ, μ)` coordinates.

use crate::autodiff::Scalar;
use crate::diagnostics::{pressure_hessian_steady, AnalyticFlow, FrameTensor2};
use crate::error::{Error, Result};
use crate::geometry::{Chart, FrameVector, Point};
use crate::quadrature::adaptive_simpson;

/// Points closer than this to the jet axis are flagged.
pub const JET_AXIS_BAND: f64 = 1e-9;

/// Zonal jet from two vorticity caps meeting at `μ = mu0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetParams {
    pub mu0: f64,
    pub delta_q: f64,
}

impl JetParams {
    pub fn new(mu0: f64, delta_q: f64) -> Result<Self> {
        if !(mu0.abs() < 1.0 && delta_q > 0.0 && delta_q.is_finite()) {
            return Err(Error::Usage(format!("jet needs |mu0| < 1 and delta_q > 0, got {mu0}, {delta_q}")));
        }
        Ok(Self { mu0, delta_q })
    }

    /// Velocity scale of the branch containing `mu`.
    pub fn branch_scale(&self, mu: f64) -> f64 {
        let half = 0.5 * self.delta_q;
        if mu >= self.mu0 {
            half * (1.0 + self.mu0)
        } else {
            half * (1.0 - self.mu0)
        }
    }

    /// Vorticity of the branch containing `mu`.
    pub fn vorticity(&self, mu: f64) -> f64 {
        let half = 0.5 * self.delta_q;
        if mu >= self.mu0 {
            half * (1.0 + self.mu0)
        } else {
            -half * (1.0 - self.mu0)
        }
    }

    /// Angular velocity `dλ/dt` of a particle at latitude `mu`.
    pub fn angular_velocity(&self, mu: f64) -> f64 {
        let c = self.branch_scale(mu);
        if mu >= self.mu0 {
            c / (1.0 + mu)
        } else {
            c / (1.0 - mu)
        }
    }

    /// Closed-form `⟨M e₂, e₂⟩`, the stretching acceleration of a meridional
    /// element.
    pub fn meridional_acceleration(&self, mu: f64) -> f64 {
        let c = self.branch_scale(mu);
        let r = if mu >= self.mu0 { (1.0 - mu) / (1.0 + mu) } else { (1.0 + mu) / (1.0 - mu) };
        r * r * c * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetFlow(pub JetParams);

impl AnalyticFlow for JetFlow {
    fn chart(&self) -> Chart {
        Chart::sphere()
    }

    fn eval<T: Scalar>(&self, _x: T, y: T) -> [T; 2] {
        let c = self.0.branch_scale(y.value());
        let ratio = if y.value() >= self.0.mu0 { (-y + 1.0) / (y + 1.0) } else { (y + 1.0) / (-y + 1.0) };
        [ratio.sqrt() * c, T::constant(0.0)]
    }

    fn flagged(&self, p: Point) -> bool {
        (p.y - self.0.mu0).abs() < JET_AXIS_BAND
    }
}

pub fn jet_velocity(params: &JetParams, p: Point) -> Result<FrameVector> {
    crate::diagnostics::VelocitySampler::velocity(&JetFlow(*params), p)
}

/// Initial meridional segment `[z0, z0 + delta_mu]` at `λ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetLineSpec {
    pub z0: f64,
    pub delta_mu: f64,
}

/// Length of the advected segment at time `t`.
pub fn jet_line_length(params: &JetParams, spec: &JetLineSpec, t: f64) -> Result<f64> {
    let (a, b) = (spec.z0, spec.z0 + spec.delta_mu);
    let (lo, hi) = (a.min(b), a.max(b));
    if !(hi.abs() < 1.0 && lo.abs() < 1.0) {
        return Err(Error::Domain { chart: "sphere", x: 0.0, y: if lo.abs() >= 1.0 { lo } else { hi } });
    }
    if lo < params.mu0 && hi > params.mu0 {
        return Err(Error::Usage("segment straddles the jet axis".into()));
    }
    if t < 0.0 {
        return Err(Error::Usage("line length needs t >= 0".into()));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let upper = lo >= params.mu0;
    let c = params.branch_scale(if upper { hi } else { lo });
    let integrand = |mu: f64| {
        // (1 − μ²)(∂λ/∂μ)² + 1/(1 − μ²) with λ(μ, t) = ω(μ) t.
        let shear = if upper {
            (1.0 - mu) * c * c * t * t / (1.0 + mu).powi(3)
        } else {
            (1.0 + mu) * c * c * t * t / (1.0 - mu).powi(3)
        };
        (shear + 1.0 / (1.0 - mu * mu)).sqrt()
    };
    let scale = (hi - lo) * integrand(0.5 * (lo + hi));
    adaptive_simpson(integrand, lo, hi, 1e-15 * scale.max(f64::MIN_POSITIVE), 50)
}

/// `½ (l²)'' / l(0)²` at time `t`, by a central difference of step `tau`.
pub fn jet_line_acceleration(params: &JetParams, spec: &JetLineSpec, t: f64, tau: f64) -> Result<f64> {
    let l2 = |s: f64| -> Result<f64> {
        let l = jet_line_length(params, spec, s.abs())?;
        Ok(l * l)
    };
    let d2 = (l2(t + tau)? - 2.0 * l2(t)? + l2(t - tau)?) / (tau * tau);
    Ok(0.5 * d2 / l2(0.0)?)
}

/// Stationary quadrupole built from the degree-two harmonics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadrupole;

const SQRT5: f64 = 2.236_067_977_499_79;
const SQRT30: f64 = 5.477_225_575_051_661;

impl Quadrupole {
    pub fn vorticity(p: Point) -> f64 {
        let (l, mu) = (p.x, p.y);
        0.5 * SQRT5 * (3.0 * mu * mu - 1.0) + 0.5 * SQRT30 * (1.0 - mu * mu) * (2.0 * l).cos()
    }

    pub fn stream_function(p: Point) -> f64 {
        -Self::vorticity(p) / 6.0
    }
}

impl AnalyticFlow for Quadrupole {
    fn chart(&self) -> Chart {
        Chart::sphere()
    }

    fn eval<T: Scalar>(&self, x: T, y: T) -> [T; 2] {
        let c = (-(y * y) + 1.0).sqrt();
        let two_l = x * 2.0;
        let u = y * c * (-two_l.cos() * SQRT30 + 3.0 * SQRT5) / 6.0;
        let v = c * two_l.sin() * (SQRT30 / 6.0);
        [u, v]
    }
}

pub fn quadrupole_velocity(p: Point) -> Result<FrameVector> {
    crate::diagnostics::VelocitySampler::velocity(&Quadrupole, p)
}

pub fn quadrupole_hessian(p: Point) -> Result<FrameTensor2> {
    pressure_hessian_steady(&Quadrupole, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{velocity_gradient, vorticity, VelocitySampler};
    use crate::geometry::metric_at;
    use std::f64::consts::PI;

    #[test]
    fn jet_velocity_values() {
        let j = JetParams::new(0.0, 2.0).unwrap();
        assert!((jet_velocity(&j, Point::new(0.0, 0.0)).unwrap().c1 - 1.0).abs() < 1e-15);
        assert!(jet_velocity(&j, Point::new(0.0, 1.0 - 1e-10)).unwrap().c1 < 1e-4);
        let j = JetParams::new(0.5, 2.0).unwrap();
        let u = jet_velocity(&j, Point::new(0.0, 0.5)).unwrap();
        assert!((u.c1 - 1.5 * (0.5f64 / 1.5).sqrt()).abs() < 1e-15 && u.c2 == 0.0);
        // Continuity across the axis.
        let below = jet_velocity(&j, Point::new(0.0, 0.5 - 1e-12)).unwrap().c1;
        assert!((below - u.c1).abs() < 1e-10);
    }

    #[test]
    fn jet_caps_have_zero_mean_vorticity() {
        for &mu0 in &[-0.7, 0.0, 0.4] {
            let j = JetParams::new(mu0, 2.0).unwrap();
            // Cap areas in μ are (1 − μ0) and (1 + μ0).
            let total = j.vorticity(0.99) * (1.0 - mu0) + j.vorticity(-0.99) * (1.0 + mu0);
            assert!(total.abs() < 1e-15);
        }
    }

    #[test]
    fn jet_tensors_match_closed_forms() {
        let j = JetFlow(JetParams::new(0.0, 2.0).unwrap());
        let p = Point::new(0.3, 0.5);
        let g = velocity_gradient(&j, p).unwrap();
        assert!(g.m11.abs() < 1e-15 && g.m22.abs() < 1e-15);
        assert!((g.m12 + 2.0 / 3.0).abs() < 1e-14);
        assert!((g.m21 - 1.0 / 3.0).abs() < 1e-14);
        assert!((vorticity(&g) - 1.0).abs() < 1e-14);
        let h = pressure_hessian_steady(&j, p).unwrap();
        assert!((h.m11 - 1.0 / 9.0).abs() < 1e-14 && h.m22.abs() < 1e-14);
        assert!(h.m12.abs() < 1e-14 && h.m21.abs() < 1e-14);
    }

    #[test]
    fn jet_zonal_momentum_balance() {
        // Zonal Euler equation for a zonal steady flow reduces to ∂λ p = 0.
        let j = JetFlow(JetParams::new(0.2, 1.5).unwrap());
        for &mu in &[-0.8, -0.1, 0.5, 0.9] {
            let [u, v] = j.eval(crate::autodiff::Taylor1::var(1.0, 0), crate::autodiff::Taylor1::var(mu, 1));
            let m = metric_at(&Chart::sphere(), Point::new(1.0, mu)).unwrap();
            let (a, _) = m.frame_connection();
            let w1 = u.v * u.d[0] / m.h1() + v.v * u.d[1] / m.h2() + a * u.v * v.v;
            assert!(w1.abs() < 1e-12);
        }
    }

    #[test]
    fn line_length_at_rest_and_degenerate() {
        let j = JetParams::new(0.0, 2.0).unwrap();
        let s = JetLineSpec { z0: 0.3, delta_mu: 0.2 };
        let l0 = jet_line_length(&j, &s, 0.0).unwrap();
        assert!((l0 - (0.5f64.asin() - 0.3f64.asin())).abs() < 1e-13);
        assert_eq!(jet_line_length(&j, &JetLineSpec { z0: 0.3, delta_mu: 0.0 }, 2.0).unwrap(), 0.0);
        assert!(jet_line_length(&j, &JetLineSpec { z0: -0.1, delta_mu: 0.2 }, 1.0).is_err());
    }

    #[test]
    fn short_line_acceleration() {
        let j = JetParams::new(0.0, 2.0).unwrap();
        let a = jet_line_acceleration(&j, &JetLineSpec { z0: 0.3, delta_mu: 1e-7 }, 2.0, 0.05).unwrap();
        assert!((a - (0.7f64 / 1.3).powi(2)).abs() < 1e-6 * a, "{a}");
    }

    #[test]
    fn quadrupole_saddles_and_vorticity() {
        for &p in &[Point::new(0.0, 0.0), Point::new(PI, 0.0)] {
            assert!(quadrupole_velocity(p).unwrap().norm() < 1e-15);
            let g = velocity_gradient(&Quadrupole, p).unwrap();
            assert!(g.symmetric().det() < 0.0);
        }
        for &(l, mu) in &[(0.3, 0.1), (2.0, -0.7), (4.5, 0.95)] {
            let p = Point::new(l, mu);
            let g = velocity_gradient(&Quadrupole, p).unwrap();
            assert!((vorticity(&g) - Quadrupole::vorticity(p)).abs() < 1e-10);
            assert!(g.trace().abs() < 1e-12);
        }
    }

    #[test]
    fn quadrupole_hessian_symmetry_and_period() {
        let p = Point::new(0.7, 0.35);
        let h = quadrupole_hessian(p).unwrap();
        assert!((h.m12 - h.m21).abs() < 1e-10);
        let hp = quadrupole_hessian(Point::new(0.7 + PI, 0.35)).unwrap();
        assert!(h.sub(&hp).frobenius() < 1e-12);
    }

    #[test]
    fn quadrupole_is_advection_free() {
        for &(l, mu) in &[(0.3, 0.1), (2.0, -0.7)] {
            let p = Point::new(l, mu);
            let u = Quadrupole.velocity(p).unwrap();
            let h = 1e-6;
            let m = metric_at(&Chart::sphere(), p).unwrap();
            let qx = (Quadrupole::vorticity(Point::new(l + h, mu)) - Quadrupole::vorticity(Point::new(l - h, mu))) / (2.0 * h);
            let qy = (Quadrupole::vorticity(Point::new(l, mu + h)) - Quadrupole::vorticity(Point::new(l, mu - h))) / (2.0 * h);
            assert!((u.c1 * qx / m.h1() + u.c2 * qy / m.h2()).abs() < 1e-8);
        }
    }
}
