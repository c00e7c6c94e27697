//! Synthesis of stationary Gaussian force, probe noise and measurement records.
//!
//! Every process is periodic on the [`TimeGrid`]: Gaussian DFT coefficients
//! with variance `n S_k / dt` are drawn with Hermitian symmetry and inverse
//! transformed, so the realized covariance is exactly
//! [`circulant_covariance`](crate::circulant::circulant_covariance) of the
//! target spectrum. The oscillator response is applied per bin, which keeps
//! the record consistent with the frequency-domain bounds.
//!
//! The probe is simulated with classical noise. For uncorrelated `xi` and
//! `eta` acting on a linear system, independent Gaussian processes with the
//! same spectra reproduce every measured statistic; the commutator only
//! enters through `S_xi S_eta >= hbar^2 / 4`.
//!
//! # Seeding
//!
//! Each stream of each trial has its own ChaCha20 generator. Its 32-byte seed
//! is `SHA-256(master_seed as u64 LE || trial_index as u64 LE || label)`, with
//! labels `b"x"`, `b"xi"` and `b"eta"`. Trials are therefore independent of
//! evaluation order and thread count.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fourier::Dft;
use crate::grid::TimeGrid;
use crate::models::{prior_spectrum, transfer_function, PriorModel, SensorModel, Topology};
use crate::spectrum::{ComplexResponse, SampledSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self, stream: Stream) -> ChaCha20Rng {
        let mut h = Sha256::new();
        h.update(self.master_seed.to_le_bytes());
        h.update(self.trial_index.to_le_bytes());
        h.update(stream.label().as_bytes());
        ChaCha20Rng::from_seed(h.finalize().into())
    }
}

/// Named random streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Force,
    Backaction,
    Measurement,
}

impl Stream {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Force => "x",
            Self::Backaction => "xi",
            Self::Measurement => "eta",
        }
    }
}

/// Reusable synthesizer for one grid.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    grid: TimeGrid,
    dft: Dft,
}

impl Synthesizer {
    pub fn new(grid: TimeGrid) -> Self {
        Self {
            grid,
            dft: Dft::new(grid.len()),
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Gaussian DFT coefficients of a real process with spectrum `s`.
    ///
    /// Draw order: bins `0..=n/2` ascending; the DC bin and the Nyquist bin
    /// take one normal deviate, every other bin takes two (real, imaginary).
    pub fn coefficients(&self, s: &SampledSpectrum, seed: SeedSpec, stream: Stream) -> Result<Vec<Complex64>> {
        let n = self.grid.len();
        if s.grid() != self.grid.frequencies() {
            return Err(Error::InvalidSpectrum("spectrum lives on a different grid".into()));
        }
        if !s.is_even(1e-12) {
            return Err(Error::InvalidSpectrum(
                "spectrum of a real process must satisfy S(-omega) = S(omega)".into(),
            ));
        }
        let mut rng = seed.rng(stream);
        let scale = n as f64 / self.grid.dt();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..=n / 2 {
            let mirror = (n - i) % n;
            let var = scale * s.at(i);
            if mirror == i {
                let a: f64 = StandardNormal.sample(&mut rng);
                coeffs[i] = Complex64::new(var.sqrt() * a, 0.0);
            } else {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                let c = Complex64::new(a, b) * (0.5 * var).sqrt();
                coeffs[i] = c;
                coeffs[mirror] = c.conj();
            }
        }
        Ok(coeffs)
    }

    /// Real Gaussian array with covariance `circulant_covariance(s)`.
    pub fn synthesize(&self, s: &SampledSpectrum, seed: SeedSpec, stream: Stream) -> Result<Vec<f64>> {
        let coeffs = self.coefficients(s, seed, stream)?;
        Ok(self.dft.inverse_real(coeffs))
    }
}

/// One-off synthesis; see [`Synthesizer::synthesize`].
pub fn synthesize_stationary(
    spectrum: &SampledSpectrum,
    grid: TimeGrid,
    seed: SeedSpec,
    stream: Stream,
) -> Result<Vec<f64>> {
    Synthesizer::new(grid).synthesize(spectrum, seed, stream)
}

/// One realization of force, probe noise, monitored position and record.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    /// Force, N.
    pub x: Vec<f64>,
    /// Backaction force, N.
    pub xi: Vec<f64>,
    /// Measurement noise, m.
    pub eta: Vec<f64>,
    /// `q` for the standard topology, collective `Q` with cancellation.
    pub position: Vec<f64>,
    /// Record `position + eta`, m.
    pub y: Vec<f64>,
}

/// Spectra and response needed to generate records.
#[derive(Debug, Clone)]
pub struct RecordModel {
    pub topology: Topology,
    pub response: ComplexResponse,
    pub force: SampledSpectrum,
    pub backaction: SampledSpectrum,
    pub measurement: SampledSpectrum,
    synth: Synthesizer,
}

impl RecordModel {
    pub fn new(
        topology: Topology,
        response: ComplexResponse,
        force: SampledSpectrum,
        backaction: SampledSpectrum,
        measurement: SampledSpectrum,
    ) -> Result<Self> {
        let freq = response.grid();
        for s in [&force, &backaction, &measurement] {
            if s.grid() != freq {
                return Err(Error::InvalidSpectrum("record spectra live on different grids".into()));
            }
        }
        Ok(Self {
            topology,
            response,
            force,
            backaction,
            measurement,
            synth: Synthesizer::new(freq.time_grid()),
        })
    }

    pub fn from_models(sensor: &SensorModel, prior: &PriorModel, grid: TimeGrid) -> Result<Self> {
        let freq = grid.frequencies();
        Self::new(
            sensor.topology,
            transfer_function(&sensor.osc, freq)?,
            prior_spectrum(prior, freq),
            SampledSpectrum::constant(freq, sensor.noise.s_xi)?,
            SampledSpectrum::constant(freq, sensor.noise.s_eta)?,
        )
    }

    pub fn grid(&self) -> TimeGrid {
        self.synth.grid()
    }

    pub fn simulate(&self, seed: SeedSpec) -> Result<Trajectory> {
        let synth = &self.synth;
        let fx = synth.coefficients(&self.force, seed, Stream::Force)?;
        let fxi = synth.coefficients(&self.backaction, seed, Stream::Backaction)?;
        let feta = synth.coefficients(&self.measurement, seed, Stream::Measurement)?;

        let mut drive = fx.clone();
        if self.topology == Topology::Standard {
            for (d, b) in drive.iter_mut().zip(&fxi) {
                *d += b;
            }
        }
        for (i, d) in drive.iter_mut().enumerate() {
            *d *= self.response.dft_multiplier(i);
        }
        let position = synth.dft.inverse_real(drive);
        let eta = synth.dft.inverse_real(feta);
        let y = position.iter().zip(&eta).map(|(q, e)| q + e).collect();
        Ok(Trajectory {
            grid: self.grid(),
            x: synth.dft.inverse_real(fx),
            xi: synth.dft.inverse_real(fxi),
            eta,
            position,
            y,
        })
    }
}

/// Generates one trajectory for the configured sensor and prior.
pub fn simulate_record(
    sensor: &SensorModel,
    prior: &PriorModel,
    grid: TimeGrid,
    seed: SeedSpec,
) -> Result<Trajectory> {
    RecordModel::from_models(sensor, prior, grid)?.simulate(seed)
}

/// Force-referred noise of a record, `z = IDFT(DFT(y) / G) - x`.
pub fn referred_noise(traj: &Trajectory, response: &ComplexResponse) -> Result<Vec<f64>> {
    let n = traj.grid.len();
    if response.grid() != traj.grid.frequencies() {
        return Err(Error::InvalidSpectrum("response lives on a different grid".into()));
    }
    let dft = Dft::new(n);
    let mut y = dft.forward_real(&traj.y);
    for (i, v) in y.iter_mut().enumerate() {
        *v /= response.dft_multiplier(i);
    }
    let referred = dft.inverse_real(y);
    Ok(referred.iter().zip(&traj.x).map(|(r, x)| r - x).collect())
}
