//! Zero-support detection from reduced-dimension linear measurements.

pub mod cli;
pub mod cmat;
pub mod coherence;
pub mod detectors;
pub mod error;
pub mod experiments;
pub mod galois;
pub mod matrices;
pub mod matrix;
pub mod rng;
pub mod scalar;
pub mod support;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, GroupPartition, MeasurementMatrix};
pub use rng::RngSpec;
pub use scalar::Real;
pub use support::{SignalInstance, SupportSet};

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type MeasurementMatrix64 = MeasurementMatrix<f64>;
pub type MeasurementMatrix32 = MeasurementMatrix<f32>;
pub type SignalInstance64 = SignalInstance<f64>;
