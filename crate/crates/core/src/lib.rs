//! Quantum limits on estimating a force waveform that drives a continuously
//! monitored harmonic oscillator.
//!
//! - [`grid`], [`spectrum`], [`circulant`]: periodic sampling lattices,
//!   two-sided angular-frequency spectra and circulant covariances.
//! - [`models`]: oscillator, probe noise, standard and backaction-cancelling
//!   topologies, Gaussian force priors.
//! - [`bounds`]: the quantum Cramér-Rao bound in spectral and matrix form and
//!   the standard quantum limit.
//! - [`sim`]: seeded synthesis of forces, probe noise and measurement records.
//! - [`estimate`]: Wiener smoothing, Kalman filtering and RTS smoothing.

pub mod bounds;
pub mod circulant;
pub mod error;
pub mod estimate;
mod fourier;
pub mod grid;
pub mod models;
pub mod sim;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::{FrequencyGrid, TimeGrid};
pub use spectrum::{ComplexResponse, SampledSpectrum};
