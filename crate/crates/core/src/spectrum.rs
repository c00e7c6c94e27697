//! Sampled two-sided power spectral densities and complex responses.
//!
//! Convention: for a stationary zero-mean process `f(t)`,
//! `S_f(omega) = integral dtau <f(t) f(t+tau)> exp(i omega tau)`, two-sided in
//! angular frequency, so the variance is `integral S_f(omega) domega / 2pi`.
//! Units are `[f]^2 s`. Values are stored in DFT order (see [`crate::grid`]).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::grid::{FrequencyGrid, TimeGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    grid: FrequencyGrid,
    values: Vec<f64>,
}

impl SampledSpectrum {
    /// Wraps DFT-ordered values; every value must be finite and `>= 0`.
    pub fn new(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidSpectrum(format!(
                "value {v} at omega = {} is not a finite non-negative number",
                grid.omega(i)
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `density(omega)` on every bin.
    pub fn from_fn(grid: FrequencyGrid, density: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| density(grid.omega(i))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: FrequencyGrid, level: f64) -> Result<Self> {
        Self::new(grid, vec![level; grid.len()])
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at DFT index `i`.
    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// True when `S(-omega) = S(omega)` on every bin, to relative tolerance `rtol`.
    pub fn is_even(&self, rtol: f64) -> bool {
        (0..self.values.len()).all(|i| {
            let a = self.values[i];
            let b = self.values[self.grid.mirror(i)];
            (a - b).abs() <= rtol * a.abs().max(b.abs())
        })
    }

    /// Bin-wise combination of two spectra on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::InvalidSpectrum("spectra live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }

    /// Multiplies every value by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    /// `(omega, value)` pairs in increasing frequency.
    pub fn monotone(&self) -> Vec<(f64, f64)> {
        self.grid
            .monotone_order()
            .into_iter()
            .map(|i| (self.grid.omega(i), self.values[i]))
            .collect()
    }
}

/// Riemann sum `domega / 2pi * sum_k S_k`, the variance of the periodic
/// process with this spectrum.
pub fn spectrum_integral(s: &SampledSpectrum) -> f64 {
    let grid = s.grid();
    s.values().iter().sum::<f64>() * grid.spacing() / (2.0 * std::f64::consts::PI)
}

/// Raw periodogram `dt |DFT(x)_k|^2 / n`.
pub fn periodogram(samples: &[f64], grid: TimeGrid) -> Result<SampledSpectrum> {
    Periodogram::new(grid).estimate(samples)
}

/// Reusable periodogram with a cached transform plan.
#[derive(Debug, Clone)]
pub struct Periodogram {
    grid: TimeGrid,
    dft: Dft,
}

impl Periodogram {
    pub fn new(grid: TimeGrid) -> Self {
        Self {
            grid,
            dft: Dft::new(grid.len()),
        }
    }

    pub fn estimate(&self, samples: &[f64]) -> Result<SampledSpectrum> {
        let n = self.grid.len();
        if samples.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: samples.len(),
            });
        }
        let scale = self.grid.dt() / n as f64;
        let values = self
            .dft
            .forward_real(samples)
            .into_iter()
            .map(|c| c.norm_sqr() * scale)
            .collect();
        SampledSpectrum::new(self.grid.frequencies(), values)
    }
}

/// Ensemble average of spectra on a common grid, summed in the given order.
pub fn average_spectra<'a>(
    spectra: impl IntoIterator<Item = &'a SampledSpectrum>,
) -> Result<SampledSpectrum> {
    let mut iter = spectra.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidSpectrum("cannot average an empty ensemble".into()))?;
    let mut acc = first.values.clone();
    let mut count = 1usize;
    for s in iter {
        if s.grid != first.grid {
            return Err(Error::InvalidSpectrum("spectra live on different grids".into()));
        }
        for (a, v) in acc.iter_mut().zip(&s.values) {
            *a += v;
        }
        count += 1;
    }
    let inv = 1.0 / count as f64;
    SampledSpectrum::new(first.grid, acc.into_iter().map(|a| a * inv).collect())
}

/// `sum |a_k - b_k| / sum b_k`, the integrated absolute error of `a` against
/// the target `b`.
pub fn integrated_relative_error(a: &SampledSpectrum, target: &SampledSpectrum) -> f64 {
    let num: f64 = a
        .values()
        .iter()
        .zip(target.values())
        .map(|(x, y)| (x - y).abs())
        .sum();
    num / target.values().iter().sum::<f64>()
}

/// Complex response (transfer function) sampled on a frequency grid.
///
/// `values[i]` is the response at angular frequency `grid.omega(i)` in the
/// `exp(-i omega t)` convention used by the spectral density definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl ComplexResponse {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    /// Multiplier applied to DFT coefficient `i` of a real input.
    ///
    /// The forward DFT uses `exp(-i omega_k t)`, the mirror image of the
    /// spectral convention, so coefficient `i` responds with
    /// `G(-omega_i) = conj(G(omega_i))`.
    pub fn dft_multiplier(&self, i: usize) -> Complex64 {
        self.values[i].conj()
    }

    /// `|G|^2` as a spectrum-shaped array.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|g| g.norm_sqr()).collect()
    }
}
