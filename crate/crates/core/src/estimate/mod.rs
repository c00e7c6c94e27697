//! Force estimators: the frequency-domain Wiener smoother and a time-domain
//! Kalman filter with Rauch-Tung-Striebel smoothing.

mod kalman;
mod wiener;

pub use kalman::{kalman_filter, rts_smoother, FilterOutput, SmootherOutput, StateSpaceModel};
pub use wiener::{smoother_error_spectrum, wiener_smoother, WienerSmoother};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::spectrum::{periodogram, SampledSpectrum};

/// An estimate scored against the true force.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub estimate: Vec<f64>,
    /// Mean over samples of `(x~_j - x_j)^2`.
    pub empirical_mse: f64,
    /// Periodogram of `x~ - x` for this record.
    pub error_spectrum: SampledSpectrum,
}

impl EstimationResult {
    pub fn score(estimate: Vec<f64>, truth: &[f64], grid: TimeGrid) -> Result<Self> {
        if estimate.len() != truth.len() {
            return Err(Error::LengthMismatch {
                expected: truth.len(),
                actual: estimate.len(),
            });
        }
        let err = errors(&estimate, truth);
        let empirical_mse = err.iter().map(|e| e * e).sum::<f64>() / err.len() as f64;
        Ok(Self {
            error_spectrum: periodogram(&err, grid)?,
            estimate,
            empirical_mse,
        })
    }

    pub fn errors(&self, truth: &[f64]) -> Vec<f64> {
        errors(&self.estimate, truth)
    }
}

fn errors(estimate: &[f64], truth: &[f64]) -> Vec<f64> {
    estimate.iter().zip(truth).map(|(a, b)| a - b).collect()
}
