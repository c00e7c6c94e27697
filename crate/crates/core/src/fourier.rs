use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse DFT pair of fixed length.
///
/// Forward: `X_k = sum_j x_j exp(-2 pi i j k / n)`.
/// Inverse: `x_j = (1/n) sum_k X_k exp(+2 pi i j k / n)`.
#[derive(Clone)]
pub(crate) struct Dft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("len", &self.len()).finish()
    }
}

impl Dft {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.forward.len()
    }

    pub(crate) fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub(crate) fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / buf.len() as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Inverse transform of a Hermitian-symmetric spectrum; imaginary
    /// round-off is dropped.
    pub(crate) fn inverse_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse_in_place(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}
