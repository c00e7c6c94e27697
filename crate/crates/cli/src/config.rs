//! Experiment configuration: a JSON object with the sensor, prior and grid.
//!
//! ```json
//! {
//!   "units": "natural",
//!   "m": 1.0, "omega_m": 1.0, "gamma": 0.001, "hbar": 1.0,
//!   "s_xi": 0.5, "quantum_limited": true,
//!   "topology": "qnc",
//!   "prior": { "type": "ou", "kappa": 0.2, "p_var": 1.0 },
//!   "grid": { "n": 32768, "dt": 0.05 },
//!   "trials": 200, "seed": 1
//! }
//! ```
//!
//! `gamma` defaults to `1e-3 * omega_m`. `hbar` defaults to 1 in natural
//! units and to the SI value with `"units": "si"`. With `quantum_limited`
//! set, `s_eta` may be omitted and is derived as `hbar^2 / (4 s_xi)`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use forcebound::models::{
    NoiseModel, OscillatorParams, PriorModel, SensorModel, Topology, DEFAULT_DAMPING_RATIO, HBAR_SI,
};
use forcebound::TimeGrid;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSpec {
    #[serde(alias = "ornstein_uhlenbeck")]
    Ou { kappa: f64, p_var: f64 },
    #[serde(alias = "band_limited_flat")]
    BandLimited { s0: f64, omega_c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub dt: f64,
}

/// The config document as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub units: Units,
    pub m: f64,
    pub omega_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    pub s_xi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_eta: Option<f64>,
    #[serde(default)]
    pub quantum_limited: bool,
    pub topology: String,
    pub prior: PriorSpec,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

pub const DEFAULT_TRIALS: u64 = 200;
pub const DEFAULT_SEED: u64 = 0;

/// A validated configuration with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub resolved: ConfigFile,
    pub sensor: SensorModel,
    pub prior: PriorModel,
    pub grid: TimeGrid,
    pub trials: u64,
    pub seed: u64,
    /// Non-fatal warnings, e.g. a record too short for the correlation times.
    pub diagnostics: Vec<String>,
}

impl ExperimentConfig {
    /// Validates a config document, applying command-line overrides for the
    /// trial count and seed.
    pub fn from_file(mut file: ConfigFile, trials: Option<u64>, seed: Option<u64>) -> Result<Self> {
        let hbar = file.hbar.unwrap_or(match file.units {
            Units::Natural => 1.0,
            Units::Si => HBAR_SI,
        });
        let gamma = file.gamma.unwrap_or(DEFAULT_DAMPING_RATIO * file.omega_m);
        let osc = OscillatorParams::new(file.m, file.omega_m, gamma, hbar)?;

        let noise = match (file.quantum_limited, file.s_eta) {
            (true, None) => NoiseModel::quantum_limited(file.s_xi, hbar)?,
            (_, Some(s_eta)) => NoiseModel::new(file.s_xi, s_eta, file.quantum_limited)?,
            (false, None) => return Err(CliError::key("s_eta", "required unless quantum_limited is true")),
        };
        let topology: Topology = file.topology.parse()?;
        let sensor = SensorModel::new(osc, noise, topology)?;

        let prior = match file.prior {
            PriorSpec::Ou { kappa, p_var } => PriorModel::ornstein_uhlenbeck(kappa, p_var)?,
            PriorSpec::BandLimited { s0, omega_c } => PriorModel::band_limited(s0, omega_c)?,
        };
        let grid = TimeGrid::new(file.grid.n, file.grid.dt)?;

        let trials = trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(CliError::key("trials", "must be positive"));
        }
        let seed = seed.or(file.seed).unwrap_or(DEFAULT_SEED);

        file.hbar = Some(hbar);
        file.gamma = Some(gamma);
        file.s_eta = Some(noise.s_eta);
        file.topology = topology.to_string();
        file.trials = Some(trials);
        file.seed = Some(seed);

        let mut diagnostics = Vec::new();
        let duration = grid.duration();
        let rate = prior.correlation_rate();
        if duration < 50.0 / rate {
            diagnostics.push(format!(
                "record duration {duration} is shorter than 50 prior correlation times (50/{rate} = {})",
                50.0 / rate
            ));
        }
        if gamma > 0.0 && duration < 50.0 / gamma {
            diagnostics.push(format!(
                "record duration {duration} is shorter than 50 damping times (50/gamma = {})",
                50.0 / gamma
            ));
        }

        Ok(Self {
            resolved: file,
            sensor,
            prior,
            grid,
            trials,
            seed,
            diagnostics,
        })
    }

    pub fn from_json(text: &str, trials: Option<u64>, seed: Option<u64>) -> Result<Self> {
        Self::from_file(ConfigFile::from_json(text)?, trials, seed)
    }

    pub fn load(path: &std::path::Path, trials: Option<u64>, seed: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, trials, seed)
    }

    /// First 16 hex digits of SHA-256 over the resolved config's compact JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.resolved).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
