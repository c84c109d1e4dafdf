//! Vorticity dynamics on the conformally curved torus.

pub mod fft;
pub mod initial;
pub mod pressure;
pub mod run;
pub mod sampler;
pub mod solver;
pub mod spectral;

pub use initial::{initial_vorticity_grid, initial_vorticity_value, initial_condition, INITIAL_COEFFS};
pub use pressure::PressureField;
pub use run::{simulate, BudgetRow, LineRow, TorusRun, TorusRunConfig};
pub use sampler::{GridFlow, TimeInterpolated};
pub use solver::{Budget, SolverState, TorusParams, TorusSolver};
pub use spectral::{GridField, SpectralField};
