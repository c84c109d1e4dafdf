use super::solver::{SolverState, TorusSolver};
use super::spectral::GridField;
use crate::error::Result;

/// Coefficients `(k, l, a, b, c, d)` of
/// `Σ a cos kx cos ly + b cos kx sin ly + c sin kx cos ly + d sin kx sin ly`;
/// entries multiplying an identically zero function are omitted.
pub const INITIAL_COEFFS: [(usize, usize, f64, f64, f64, f64); 9] = [
    (0, 0, 0.05983618385516437, 0.0, 0.0, 0.0),
    (0, 1, -0.07844948104163184, -0.19049291872705523, 0.0, 0.0),
    (0, 2, 0.12523658449465810, 0.05827967227392698, 0.0, 0.0),
    (1, 0, 0.16532280170939714, 0.0, 0.19681063366118581, 0.0),
    (1, 1, -0.11693416269523071, -0.10944106134331011, -0.31923881592497894, -0.19180157757767999),
    (1, 2, 0.39389003962238250, 0.32536644789854924, -0.16743435702548920, 0.23382559599065009),
    (2, 0, -0.08428800796409970, 0.0, -0.10316648330130607, 0.0),
    (2, 1, 0.04229008794099242, 0.26029577962448952, 0.02821210104193395, 0.39408167049915921),
    (2, 2, 0.30077848482043962, 0.00188425339698650, -0.22662753731338633, -0.37903947388947745),
];

/// The tabulated field at a point, before any mean adjustment.
pub fn initial_vorticity_value(x: f64, y: f64) -> f64 {
    INITIAL_COEFFS.iter().fold(0.0, |acc, &(k, l, a, b, c, d)| {
        let (sk, ck) = (k as f64 * x).sin_cos();
        let (sl, cl) = (l as f64 * y).sin_cos();
        acc + a * ck * cl + b * ck * sl + c * sk * cl + d * sk * sl
    })
}

pub fn initial_vorticity_grid(nx: usize, ny: usize) -> GridField {
    GridField::from_fn(nx, ny, initial_vorticity_value)
}

/// Tabulated field on the solver grid with its g-weighted mean removed.
pub fn initial_condition(solver: &mut TorusSolver) -> Result<SolverState> {
    let p = *solver.params();
    solver.state_from_grid(&initial_vorticity_grid(p.nx, p.ny), 0.0)
}
