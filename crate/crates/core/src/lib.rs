//! Incompressible 2-D Euler flow diagnostics on curved surfaces.

pub mod autodiff;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lagrangian;
pub mod pdisk;
pub mod quadrature;
pub mod spectral_bounds;
pub mod sphere_flows;
pub mod tensor;
pub mod torus;

pub use diagnostics::{
    classify, classify_steady, strain_acceleration, velocity_gradient, ClassifyOptions, HyperbolicClass,
    HyperbolicVerdict, VelocitySampler,
};
pub use error::{Error, Result};
pub use geometry::{Chart, ChartKind, FrameVector, MetricData, Point};
pub use tensor::FrameTensor2;
