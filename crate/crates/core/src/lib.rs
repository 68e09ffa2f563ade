//! Linear simple cycle reservoirs and their reservoir kernels.
//!
//! The crate builds cycle reservoirs, computes the metric tensor of the
//! induced kernel on look-back windows and its motif decomposition, checks
//! the circulant/centrosymmetric structure that appears at unit spectral
//! radius, measures the Fourier-plane relative area of motif spectra, and
//! runs motif-space forecasting experiments with ridge readouts.

pub mod cli;
pub mod data;
pub mod error;
pub mod export;
pub mod forecast;
pub mod kernel;
pub mod numerics;
pub mod pi;
pub mod reservoir;
pub mod spectral;
pub mod structure;

pub use error::{Error, Result};
pub use kernel::{MetricTensor, MotifBasis};
pub use reservoir::CycleReservoir;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
