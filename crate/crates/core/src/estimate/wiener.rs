use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::grid::TimeGrid;
use crate::models::{observation_noise_spectrum, prior_spectrum, transfer_function, PriorModel, SensorModel};
use crate::spectrum::SampledSpectrum;

/// Noncausal minimum mean-square-error force estimator.
///
/// Per bin, `x~ = S_dx / (S_dx + S_z) * y / G`. It is evaluated in the fused
/// form `S_dx conj(G) y / (S_dx |G|^2 + S_eta + S_xi |G|^2 [standard])`, which
/// stays finite near resonance where `|G|` is large.
#[derive(Debug, Clone)]
pub struct WienerSmoother {
    grid: TimeGrid,
    /// Multiplier on each DFT coefficient of the record.
    gains: Vec<Complex64>,
    dft: Dft,
}

impl WienerSmoother {
    pub fn new(sensor: &SensorModel, prior: &PriorModel, grid: TimeGrid) -> Result<Self> {
        let freq = grid.frequencies();
        let g = transfer_function(&sensor.osc, freq)?;
        let s_dx = prior_spectrum(prior, freq);
        let backaction = if sensor.backaction_in_record() {
            sensor.noise.s_xi
        } else {
            0.0
        };
        let gains = (0..freq.len())
            .map(|i| {
                let sx = s_dx.at(i);
                if sx == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let gb = g.dft_multiplier(i);
                let g2 = gb.norm_sqr();
                gb.conj() * sx / (sx * g2 + sensor.noise.s_eta + backaction * g2)
            })
            .collect();
        Ok(Self {
            grid,
            gains,
            dft: Dft::new(grid.len()),
        })
    }

    pub fn estimate(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.len();
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: y.len(),
            });
        }
        let mut coeffs = self.dft.forward_real(y);
        for (c, g) in coeffs.iter_mut().zip(&self.gains) {
            *c *= g;
        }
        Ok(self.dft.inverse_real(coeffs))
    }
}

/// Estimates the force from a record; see [`WienerSmoother`].
pub fn wiener_smoother(y: &[f64], sensor: &SensorModel, prior: &PriorModel, grid: TimeGrid) -> Result<Vec<f64>> {
    WienerSmoother::new(sensor, prior, grid)?.estimate(y)
}

/// Error spectrum of the Wiener smoother, `S_dx S_z / (S_dx + S_z)`, zero
/// wherever the prior vanishes.
pub fn smoother_error_spectrum(
    sensor: &SensorModel,
    prior: &PriorModel,
    grid: crate::grid::FrequencyGrid,
) -> Result<SampledSpectrum> {
    let s_z = observation_noise_spectrum(sensor, grid)?;
    let s_dx = prior_spectrum(prior, grid);
    s_dx.zip_with(&s_z, combine)
}

fn combine(sx: f64, sz: f64) -> f64 {
    if sx == 0.0 || sz == 0.0 {
        0.0
    } else {
        sx * sz / (sx + sz)
    }
}
