//! Experiment driver: configuration, output files and the named runs.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Experiment, RunConfig};
pub use output::{Manifest, Outputs};
