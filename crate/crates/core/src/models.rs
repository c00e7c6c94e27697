//! Oscillator, probe noise, sensor topology and Gaussian force priors.
//!
//! The force `x(t)` drives an oscillator with Hamiltonian
//! `p^2/2m + m omega_m^2 q^2 / 2 - q x(t)`, damped weakly at rate `gamma`.
//! A continuous position probe adds white measurement noise `eta` to the
//! record and white backaction force `xi` on the oscillator, with
//! `S_xi S_eta >= hbar^2 / 4`.
//!
//! In the [`Topology::Qnc`] configuration an auxiliary oscillator with equal
//! frequency and opposite mass is monitored together with the first one. The
//! backaction acts equally on both and cancels from the collective position,
//! so the record sees the force through the same transfer function but
//! without backaction. The auxiliary mode is represented only through that
//! cancellation.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::FrequencyGrid;
use crate::spectrum::{ComplexResponse, SampledSpectrum};

/// Reduced Planck constant in J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Default damping regularizer as a fraction of the resonance frequency.
pub const DEFAULT_DAMPING_RATIO: f64 = 1e-3;

/// Relative tolerance used to decide `S_xi S_eta == hbar^2 / 4`.
pub const QUANTUM_LIMIT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    /// kg
    pub mass: f64,
    /// rad/s
    pub omega_m: f64,
    /// Amplitude damping rate in rad/s; `m q'' + m gamma q' + m omega_m^2 q = F`.
    pub gamma: f64,
    /// J s
    pub hbar: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, omega_m: f64, gamma: f64, hbar: f64) -> Result<Self> {
        positive("m", mass)?;
        positive("omega_m", omega_m)?;
        positive("hbar", hbar)?;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(invalid("gamma", format!("must be finite and >= 0, got {gamma}")));
        }
        Ok(Self {
            mass,
            omega_m,
            gamma,
            hbar,
        })
    }

    /// Same oscillator with `gamma = 1e-3 omega_m`.
    pub fn with_default_damping(mass: f64, omega_m: f64, hbar: f64) -> Result<Self> {
        Self::new(mass, omega_m, DEFAULT_DAMPING_RATIO * omega_m, hbar)
    }

    /// `G(omega) = 1 / [m (omega_m^2 - omega^2 - i gamma omega)]`, or `None`
    /// where the denominator vanishes.
    pub fn response(&self, omega: f64) -> Option<Complex64> {
        let den = Complex64::new(
            self.mass * (self.omega_m * self.omega_m - omega * omega),
            -self.mass * self.gamma * omega,
        );
        (den.norm_sqr() > 0.0).then(|| den.inv())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Backaction force spectrum, N^2 s.
    pub s_xi: f64,
    /// Measurement noise spectrum, m^2 s.
    pub s_eta: f64,
    pub quantum_limited: bool,
}

impl NoiseModel {
    /// Quantum-limited probe: `S_eta = hbar^2 / (4 S_xi)`.
    pub fn quantum_limited(s_xi: f64, hbar: f64) -> Result<Self> {
        positive("s_xi", s_xi)?;
        positive("hbar", hbar)?;
        Ok(Self {
            s_xi,
            s_eta: hbar * hbar / (4.0 * s_xi),
            quantum_limited: true,
        })
    }

    /// Probe with independent noise levels; validated against `hbar` when a
    /// [`SensorModel`] is built.
    pub fn new(s_xi: f64, s_eta: f64, quantum_limited: bool) -> Result<Self> {
        positive("s_xi", s_xi)?;
        positive("s_eta", s_eta)?;
        Ok(Self {
            s_xi,
            s_eta,
            quantum_limited,
        })
    }

    fn check_uncertainty(&self, hbar: f64) -> Result<()> {
        let floor = hbar * hbar / 4.0;
        let product = self.s_xi * self.s_eta;
        let at_limit = (product - floor).abs() <= QUANTUM_LIMIT_RTOL * floor;
        if product < floor && !at_limit {
            return Err(invalid(
                "s_eta",
                format!("s_xi * s_eta = {product:e} violates the uncertainty floor hbar^2/4 = {floor:e}"),
            ));
        }
        if self.quantum_limited != at_limit {
            let reason = if self.quantum_limited {
                format!("flag set but s_xi * s_eta = {product:e} exceeds hbar^2/4 = {floor:e}")
            } else {
                "flag unset but s_xi * s_eta sits exactly at hbar^2/4".to_string()
            };
            return Err(invalid("quantum_limited", reason));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Single oscillator; record `y = q + eta`.
    Standard,
    /// Backaction-cancelling pair; record `y = Q + eta` with `Q = q + q'`.
    Qnc,
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Self::Standard),
            "qnc" => Ok(Self::Qnc),
            other => Err(invalid("topology", format!("expected `standard` or `qnc`, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::Qnc => "qnc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    pub osc: OscillatorParams,
    pub noise: NoiseModel,
    pub topology: Topology,
}

impl SensorModel {
    pub fn new(osc: OscillatorParams, noise: NoiseModel, topology: Topology) -> Result<Self> {
        noise.check_uncertainty(osc.hbar)?;
        if topology == Topology::Standard && osc.gamma <= 0.0 {
            return Err(invalid(
                "gamma",
                "the standard topology needs gamma > 0 so the backaction-driven position is stationary",
            ));
        }
        Ok(Self {
            osc,
            noise,
            topology,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.osc.hbar
    }

    /// Whether backaction reaches the monitored coordinate.
    pub fn backaction_in_record(&self) -> bool {
        self.topology == Topology::Standard
    }
}

/// Stationary Gaussian prior for the force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorModel {
    /// `S(omega) = 2 kappa p_var / (kappa^2 + omega^2)`.
    OrnsteinUhlenbeck { kappa: f64, p_var: f64 },
    /// `S(omega) = s0` for `|omega| <= omega_c`, zero outside.
    BandLimitedFlat { s0: f64, omega_c: f64 },
}

impl PriorModel {
    pub fn ornstein_uhlenbeck(kappa: f64, p_var: f64) -> Result<Self> {
        positive("prior.kappa", kappa)?;
        positive("prior.p_var", p_var)?;
        Ok(Self::OrnsteinUhlenbeck { kappa, p_var })
    }

    pub fn band_limited(s0: f64, omega_c: f64) -> Result<Self> {
        positive("prior.s0", s0)?;
        positive("prior.omega_c", omega_c)?;
        Ok(Self::BandLimitedFlat { s0, omega_c })
    }

    pub fn density(&self, omega: f64) -> f64 {
        match *self {
            Self::OrnsteinUhlenbeck { kappa, p_var } => 2.0 * kappa * p_var / (kappa * kappa + omega * omega),
            Self::BandLimitedFlat { s0, omega_c } => {
                if omega.abs() <= omega_c {
                    s0
                } else {
                    0.0
                }
            }
        }
    }

    /// Stationary variance of the continuous-time process.
    pub fn variance(&self) -> f64 {
        match *self {
            Self::OrnsteinUhlenbeck { p_var, .. } => p_var,
            Self::BandLimitedFlat { s0, omega_c } => s0 * omega_c / std::f64::consts::PI,
        }
    }

    /// Slowest correlation rate, used for record-length diagnostics.
    pub fn correlation_rate(&self) -> f64 {
        match *self {
            Self::OrnsteinUhlenbeck { kappa, .. } => kappa,
            Self::BandLimitedFlat { omega_c, .. } => omega_c,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// Oscillator transfer function on every bin.
pub fn transfer_function(osc: &OscillatorParams, grid: FrequencyGrid) -> Result<ComplexResponse> {
    let values = (0..grid.len())
        .map(|i| {
            let omega = grid.omega(i);
            osc.response(omega).ok_or(Error::ResonanceSingularity { omega })
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexResponse::new(grid, values)
}

pub fn prior_spectrum(prior: &PriorModel, grid: FrequencyGrid) -> SampledSpectrum {
    SampledSpectrum::from_fn(grid, |w| prior.density(w)).expect("validated prior densities are finite and >= 0")
}

/// Force-referred noise `S_z` of the record `y = G (x + z)`:
/// `S_eta / |G|^2 + S_xi` for the standard topology, `S_eta / |G|^2` with
/// backaction cancellation.
pub fn observation_noise_spectrum(sensor: &SensorModel, grid: FrequencyGrid) -> Result<SampledSpectrum> {
    let g = transfer_function(&sensor.osc, grid)?;
    let backaction = if sensor.backaction_in_record() {
        sensor.noise.s_xi
    } else {
        0.0
    };
    let values = g
        .power()
        .into_iter()
        .map(|g2| sensor.noise.s_eta / g2 + backaction)
        .collect();
    SampledSpectrum::new(grid, values)
}

/// Backaction-driven fluctuation spectrum of the monitored coordinate:
/// `|G|^2 S_xi` for the standard topology and zero with cancellation.
pub fn backaction_position_spectrum(sensor: &SensorModel, grid: FrequencyGrid) -> Result<SampledSpectrum> {
    if !sensor.backaction_in_record() {
        // Still validate the response so both topologies fail alike at resonance.
        transfer_function(&sensor.osc, grid)?;
        return Ok(SampledSpectrum::zeros(grid));
    }
    coupled_position_spectrum(sensor, grid)
}

/// Fluctuation spectrum `S_dq = |G|^2 S_xi` of the position operator that
/// couples to the force.
///
/// The force acts on the physical oscillator in both topologies, and the
/// probe's backaction drives that oscillator whether or not it cancels from
/// the monitored sum. This spectrum sets the quantum Fisher information.
pub fn coupled_position_spectrum(sensor: &SensorModel, grid: FrequencyGrid) -> Result<SampledSpectrum> {
    let g = transfer_function(&sensor.osc, grid)?;
    let values = g.power().into_iter().map(|g2| g2 * sensor.noise.s_xi).collect();
    SampledSpectrum::new(grid, values)
}
