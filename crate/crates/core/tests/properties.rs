//! Invariants over random inputs.

use proptest::prelude::*;
use riemflow::diagnostics::{pressure_hessian_steady, strain_acceleration};
use riemflow::geometry::{Chart, FrameVector, Point};
use riemflow::lagrangian::{advect, tangent_at, Steady};
use riemflow::pdisk::DiskFlow;
use riemflow::spectral_bounds::coeffs_by_series;
use riemflow::sphere_flows::{JetFlow, JetParams, Quadrupole};
use riemflow::torus::{GridField, TorusParams, TorusSolver};
use riemflow::{classify_steady, ClassifyOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_only_shrinks_the_sphere_domain(lam in 0.0f64..6.28, mu in -0.98f64..0.98) {
        let p = Point::new(lam, mu);
        let with = classify_steady(&Quadrupole, p, &ClassifyOptions::default()).unwrap();
        let without = classify_steady(&Quadrupole, p, &ClassifyOptions::without_curvature()).unwrap();
        prop_assert!(!with.class.is_hyperbolic() || without.class.is_hyperbolic());
    }

    #[test]
    fn jet_acceleration_is_semidefinite(mu0 in -0.8f64..0.8, mu in -0.95f64..0.95, lam in 0.0f64..6.28) {
        let f = JetFlow(JetParams::new(mu0, 2.0).unwrap());
        let p = Point::new(lam, mu);
        let h = pressure_hessian_steady(&f, p).unwrap();
        let m = strain_acceleration(&Chart::sphere(), p, &f, &h).unwrap();
        let e = m.sym_eigen().values;
        prop_assert!(e[0].min(e[1]) >= -1e-10 * (1.0 + m.frobenius()));
    }

    #[test]
    fn strain_acceleration_is_symmetric(r in 0.0f64..0.9, th in 0.0f64..6.28) {
        let p = Point::new(r * th.cos(), r * th.sin());
        let h = pressure_hessian_steady(&DiskFlow, p).unwrap();
        let m = strain_acceleration(&Chart::disk(), p, &DiskFlow, &h).unwrap();
        prop_assert!((m.m12 - m.m21).abs() <= 1e-10 * (1.0 + m.frobenius()));
    }

    #[test]
    fn tangent_map_is_reversible(lam in 0.0f64..6.28, mu in -0.9f64..0.9, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        prop_assume!(a.hypot(b) > 0.1);
        let (x0, xi0, dt) = (Point::new(lam, mu), FrameVector::new(a, b), 1e-2);
        let x1 = advect(&Quadrupole, x0, 0.0, 0.5, dt).unwrap().last();
        let xi1 = tangent_at(&Steady(&Quadrupole), x0, xi0, 0.0, 0.5, dt).unwrap();
        let back = tangent_at(&Steady(&Quadrupole), x1, xi1, 0.5, 0.0, dt).unwrap();
        prop_assert!(back.sub(xi0).norm() < 1e-6 * xi0.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn metric_coefficients_are_symmetric(alpha in 0.1f64..2.5) {
        let t = coeffs_by_series(alpha, 12, 60).unwrap();
        for k in -12i64..=12 {
            for l in -12i64..=12 {
                let z = t.get(k, l);
                prop_assert_eq!(z, t.get(-k, -l));
                prop_assert!((z - t.get(l, k)).norm() <= 1e-15 * t.get(0, 0).norm());
            }
        }
    }

    #[test]
    fn torus_states_have_zero_weighted_mean(c in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let p = TorusParams { nx: 32, ny: 32, k_max: 10, ..TorusParams::desk() };
        let mut s = TorusSolver::new(p).unwrap();
        let q = GridField::from_fn(32, 32, |x, y| {
            c[0] + c[1] * x.cos() + c[2] * y.sin() + c[3] * (x + 2.0 * y).cos() + c[4] * (3.0 * x).sin() * y.cos() + c[5]
        });
        let st = s.state_from_grid(&q, 0.0).unwrap();
        prop_assert!(s.g_weighted_mean(&st).abs() < 1e-13);
        prop_assert!(st.q.conjugate_asymmetry() < 1e-13);
        prop_assert!(st.q.max_beyond_truncation() == 0.0);
        let next = s.step_rk4(&st).unwrap();
        prop_assert!(s.g_weighted_mean(&next).abs() < 1e-13);
    }
}
