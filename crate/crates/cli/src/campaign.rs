//! Subcommand implementations. Each returns the tables it would write, so
//! nothing touches the output directory until the whole computation succeeded.

use std::path::Path;

use rayon::prelude::*;

use forcebound::bounds::{matrix_point_bound, point_qcrb, BoundReport, FisherMatrices};
use forcebound::circulant::{check_dense_cap, circulant_eigenvalues, Circulant};
use forcebound::estimate::{kalman_filter, rts_smoother, smoother_error_spectrum, EstimationResult, StateSpaceModel, WienerSmoother};
use forcebound::models::{coupled_position_spectrum, observation_noise_spectrum, prior_spectrum, PriorModel};
use forcebound::sim::{RecordModel, SeedSpec, Trajectory};
use forcebound::spectrum::{spectrum_integral, Periodogram, SampledSpectrum};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::report::{Cell, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Trials simulated per parallel batch in a Monte Carlo campaign.
const BATCH: u64 = 64;

/// Named output tables of one subcommand.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub files: Vec<(String, Table)>,
}

impl Outputs {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn write_all(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (name, table) in &self.files {
            table.write(&dir.join(name))?;
        }
        Ok(())
    }

    fn add(&mut self, cfg: &ExperimentConfig, command: &str, name: &str, mut table: Table) {
        let mut meta = vec![
            ("forcebound".to_string(), VERSION.to_string()),
            ("command".to_string(), command.to_string()),
            ("config_hash".to_string(), cfg.hash()),
            ("seed".to_string(), cfg.seed.to_string()),
        ];
        meta.append(&mut table.metadata);
        table.metadata = meta;
        self.files.push((name.to_string(), table));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Wiener,
    Rts,
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "wiener" => Ok(Self::Wiener),
            "rts" => Ok(Self::Rts),
            other => Err(format!("unknown estimator `{other}` (expected wiener or rts)")),
        }
    }
}

/// Bound spectra and the point-error bound.
pub fn run_bound(cfg: &ExperimentConfig) -> Result<Outputs> {
    let freq = cfg.grid.frequencies();
    let report = BoundReport::compute(&cfg.sensor, &cfg.prior, freq)?;
    let s_dx = prior_spectrum(&cfg.prior, freq);
    let s_dq = coupled_position_spectrum(&cfg.sensor, freq)?;
    let s_z = observation_noise_spectrum(&cfg.sensor, freq)?;
    let achievable = smoother_error_spectrum(&cfg.sensor, &cfg.prior, freq)?;

    let mut spectra = Table::new(&["omega", "s_dx", "s_dq", "s_z", "s_sql", "c_min"]);
    for i in freq.monotone_order() {
        spectra.push(vec![
            freq.omega(i).into(),
            s_dx.at(i).into(),
            s_dq.at(i).into(),
            s_z.at(i).into(),
            report.s_sql.at(i).into(),
            report.c_min.at(i).into(),
        ]);
    }
    spectra.meta("pi_min", format!("{:e}", report.pi_min));

    let mut summary = Table::key_value();
    summary.push_kv("topology", cfg.sensor.topology.to_string());
    summary.push_kv("n", cfg.grid.len());
    summary.push_kv("dt", cfg.grid.dt());
    summary.push_kv("pi_min", report.pi_min);
    summary.push_kv("smoother_pi", spectrum_integral(&achievable));
    summary.push_kv("prior_variance_on_grid", spectrum_integral(&s_dx));

    let mut out = Outputs::default();
    out.add(cfg, "bound", "bound_spectra.csv", spectra);
    out.add(cfg, "bound", "bound_summary.csv", summary);
    Ok(out)
}

fn trajectory_table(traj: &Trajectory, extra: &[(&str, &[f64])]) -> Table {
    let mut header = vec!["t", "x", "xi", "eta", "position", "y"];
    header.extend(extra.iter().map(|(name, _)| *name));
    let mut table = Table::new(&header);
    for j in 0..traj.grid.len() {
        let mut row: Vec<Cell> = vec![
            traj.grid.time(j).into(),
            traj.x[j].into(),
            traj.xi[j].into(),
            traj.eta[j].into(),
            traj.position[j].into(),
            traj.y[j].into(),
        ];
        row.extend(extra.iter().map(|(_, col)| Cell::Num(col[j])));
        table.push(row);
    }
    table
}

/// One simulated trajectory.
pub fn run_simulate(cfg: &ExperimentConfig, trial: u64) -> Result<Outputs> {
    let model = RecordModel::from_models(&cfg.sensor, &cfg.prior, cfg.grid)?;
    let traj = model.simulate(SeedSpec::new(cfg.seed, trial))?;
    let mut table = trajectory_table(&traj, &[]);
    table.meta("trial", trial);
    let mut out = Outputs::default();
    out.add(cfg, "simulate", "trajectory.csv", table);
    Ok(out)
}

/// One simulated trajectory with its force estimate.
pub fn run_estimate(cfg: &ExperimentConfig, trial: u64, estimator: Estimator) -> Result<Outputs> {
    let model = RecordModel::from_models(&cfg.sensor, &cfg.prior, cfg.grid)?;
    let traj = model.simulate(SeedSpec::new(cfg.seed, trial))?;
    let mut summary = Table::key_value();
    summary.push_kv("estimator", match estimator {
        Estimator::Wiener => "wiener",
        Estimator::Rts => "rts",
    });
    summary.push_kv("trial", trial);

    let estimate = match estimator {
        Estimator::Wiener => {
            let est = WienerSmoother::new(&cfg.sensor, &cfg.prior, cfg.grid)?.estimate(&traj.y)?;
            let achievable = smoother_error_spectrum(&cfg.sensor, &cfg.prior, cfg.grid.frequencies())?;
            summary.push_kv("expected_mse", spectrum_integral(&achievable));
            est
        }
        Estimator::Rts => {
            let ss = StateSpaceModel::from_models(&cfg.sensor, &cfg.prior, cfg.grid.dt())?;
            let filter = kalman_filter(&traj.y, &ss)?;
            let smooth = rts_smoother(&filter, &ss)?;
            let est = smooth.force_estimate();
            let range = smooth.interior();
            let len = range.len() as f64;
            let interior_mse = range.map(|j| (est[j] - traj.x[j]).powi(2)).sum::<f64>() / len;
            summary.push_kv("expected_mse", smooth.interior_force_variance());
            summary.push_kv("interior_mse", interior_mse);
            summary.push_kv("kalman_filter_variance", filter.steady_state_force_variance());
            est
        }
    };
    let result = EstimationResult::score(estimate, &traj.x, cfg.grid)?;
    let err = result.errors(&traj.x);
    summary.push_kv("empirical_mse", result.empirical_mse);
    summary.push_kv("pi_min", point_qcrb(&cfg.sensor, &cfg.prior, cfg.grid.frequencies())?);

    let mut table = trajectory_table(&traj, &[("x_hat", &result.estimate), ("err", &err)]);
    table.meta("trial", trial);
    let mut out = Outputs::default();
    out.add(cfg, "estimate", "estimate.csv", table);
    out.add(cfg, "estimate", "estimate_summary.csv", summary);
    Ok(out)
}

struct TrialOutcome {
    mse: f64,
    error_spectrum: SampledSpectrum,
}

/// Aggregated Monte Carlo statistics, in addition to the written tables.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub pi_min: f64,
    pub smoother_pi: f64,
    pub empirical_pi: f64,
    pub empirical_pi_stderr: f64,
    pub achieved: SampledSpectrum,
    pub achieved_stderr: Vec<f64>,
    pub c_min: SampledSpectrum,
    pub per_trial_mse: Vec<f64>,
    /// Steady-state Kalman filter and interior RTS force variances, when the
    /// prior has a state-space form.
    pub filter_smoother_variances: Option<(f64, f64)>,
}

/// Simulates and smooths `cfg.trials` records and compares the achieved
/// error with the bound. Runs on the ambient rayon pool; results do not
/// depend on its size.
pub fn run_montecarlo(cfg: &ExperimentConfig) -> Result<(Outputs, MonteCarloSummary)> {
    if cfg.trials < 2 {
        return Err(CliError::key("trials", "a Monte Carlo campaign needs at least 2 trials"));
    }
    let grid = cfg.grid;
    let freq = grid.frequencies();
    let n = grid.len();
    let records = RecordModel::from_models(&cfg.sensor, &cfg.prior, grid)?;
    let smoother = WienerSmoother::new(&cfg.sensor, &cfg.prior, grid)?;
    let periodogram = Periodogram::new(grid);

    let run_trial = |t: u64| -> forcebound::Result<TrialOutcome> {
        let traj = records.simulate(SeedSpec::new(cfg.seed, t))?;
        let est = smoother.estimate(&traj.y)?;
        let err: Vec<f64> = est.iter().zip(&traj.x).map(|(a, b)| a - b).collect();
        Ok(TrialOutcome {
            mse: err.iter().map(|e| e * e).sum::<f64>() / n as f64,
            error_spectrum: periodogram.estimate(&err)?,
        })
    };

    // Index-ordered gather per batch, then a sequential reduction.
    let mut per_trial_mse = Vec::with_capacity(cfg.trials as usize);
    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + BATCH).min(cfg.trials);
        let batch: Vec<forcebound::Result<TrialOutcome>> = (start..end).into_par_iter().map(run_trial).collect();
        for (offset, outcome) in batch.into_iter().enumerate() {
            let outcome = outcome.map_err(|source| CliError::Trial {
                trial: start + offset as u64,
                source,
            })?;
            per_trial_mse.push(outcome.mse);
            for ((s, q), v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(outcome.error_spectrum.values()) {
                *s += v;
                *q += v * v;
            }
        }
        start = end;
    }

    let trials = cfg.trials as f64;
    let achieved_values: Vec<f64> = sum.iter().map(|s| s / trials).collect();
    let achieved_stderr: Vec<f64> = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, q)| {
            let mean = s / trials;
            ((q / trials - mean * mean).max(0.0) * trials / (trials - 1.0) / trials).sqrt()
        })
        .collect();
    let achieved = SampledSpectrum::new(freq, achieved_values)?;
    let (empirical_pi, empirical_pi_stderr) = mean_and_stderr(&per_trial_mse);

    let report = BoundReport::compute(&cfg.sensor, &cfg.prior, freq)?;
    let s_z = observation_noise_spectrum(&cfg.sensor, freq)?;
    let s_dx = prior_spectrum(&cfg.prior, freq);
    let expected = smoother_error_spectrum(&cfg.sensor, &cfg.prior, freq)?;
    let smoother_pi = spectrum_integral(&expected);

    let filter_smoother_variances = match (cfg.prior, cfg.sensor.osc.gamma > 0.0) {
        (PriorModel::OrnsteinUhlenbeck { .. }, true) => {
            let ss = StateSpaceModel::from_models(&cfg.sensor, &cfg.prior, grid.dt())?;
            let filter = kalman_filter(&vec![0.0; n], &ss)?;
            let smooth = rts_smoother(&filter, &ss)?;
            Some((filter.steady_state_force_variance(), smooth.interior_force_variance()))
        }
        _ => None,
    };

    let mut spectra = Table::new(&[
        "omega",
        "s_dx",
        "s_z",
        "s_sql",
        "c_min",
        "expected",
        "achieved",
        "achieved_stderr",
        "saturation",
    ]);
    spectra.meta("trials", cfg.trials);
    for i in freq.monotone_order() {
        let c = report.c_min.at(i);
        let saturation = if c > 0.0 { achieved.at(i) / c } else { f64::NAN };
        spectra.push(vec![
            freq.omega(i).into(),
            s_dx.at(i).into(),
            s_z.at(i).into(),
            report.s_sql.at(i).into(),
            c.into(),
            expected.at(i).into(),
            achieved.at(i).into(),
            achieved_stderr[i].into(),
            saturation.into(),
        ]);
    }

    let mut summary = Table::key_value();
    summary.push_kv("topology", cfg.sensor.topology.to_string());
    summary.push_kv("trials", cfg.trials);
    summary.push_kv("pi_min", report.pi_min);
    summary.push_kv("smoother_pi", smoother_pi);
    summary.push_kv("empirical_pi", empirical_pi);
    summary.push_kv("empirical_pi_stderr", empirical_pi_stderr);
    summary.push_kv("ratio_to_bound", empirical_pi / report.pi_min);
    summary.push_kv("ratio_to_bound_stderr", empirical_pi_stderr / report.pi_min);
    summary.push_kv("z_vs_bound", (empirical_pi - report.pi_min) / empirical_pi_stderr);
    summary.push_kv("z_vs_smoother", (empirical_pi - smoother_pi) / empirical_pi_stderr);
    if let Some((filtered, smoothed)) = filter_smoother_variances {
        summary.push_kv("kalman_filter_variance", filtered);
        summary.push_kv("rts_interior_variance", smoothed);
    }

    let mut per_trial = Table::new(&["trial", "mse"]);
    for (t, mse) in per_trial_mse.iter().enumerate() {
        per_trial.push(vec![Cell::Int(t as u64), Cell::Num(*mse)]);
    }

    let mut out = Outputs::default();
    out.add(cfg, "montecarlo", "montecarlo_spectra.csv", spectra);
    out.add(cfg, "montecarlo", "montecarlo_summary.csv", summary);
    out.add(cfg, "montecarlo", "montecarlo_trials.csv", per_trial);

    let summary = MonteCarloSummary {
        trials: cfg.trials,
        pi_min: report.pi_min,
        smoother_pi,
        empirical_pi,
        empirical_pi_stderr,
        achieved,
        achieved_stderr,
        c_min: report.c_min,
        per_trial_mse,
        filter_smoother_variances,
    };
    Ok((out, summary))
}

fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// How the Fisher matrices are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherPath {
    /// Materialize dense matrices (capped at [`forcebound::circulant::DENSE_CAP`]).
    Dense,
    /// Work with circulant generators only.
    Circulant,
}

/// Matrix-form bound against the spectral bound, with eigenvalue diagnostics.
pub fn run_fisher(cfg: &ExperimentConfig, path: FisherPath) -> Result<Outputs> {
    let grid = cfg.grid;
    if path == FisherPath::Dense {
        check_dense_cap(grid)?;
    }
    let fm = FisherMatrices::compute(&cfg.sensor, &cfg.prior, grid)?;
    let (quantum, classical) = match path {
        FisherPath::Circulant => (fm.f_quantum.eigenvalues(), fm.f_classical.eigenvalues()),
        FisherPath::Dense => (
            circulant_eigenvalues(&fm.f_quantum.to_dense())?,
            circulant_eigenvalues(&fm.f_classical.to_dense())?,
        ),
    };
    let total: Vec<f64> = quantum.iter().zip(&classical).map(|(a, b)| a + b).collect();
    let fm = FisherMatrices {
        grid,
        f_quantum: Circulant::from_eigenvalues(&quantum)?,
        f_classical: Circulant::from_eigenvalues(&classical)?,
    };
    let matrix = matrix_point_bound(&fm)?;
    let spectral = point_qcrb(&cfg.sensor, &cfg.prior, grid.frequencies())?;

    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    };
    let mut summary = Table::key_value();
    summary.push_kv("path", match path {
        FisherPath::Dense => "dense",
        FisherPath::Circulant => "circulant",
    });
    summary.push_kv("n", grid.len());
    summary.push_kv("matrix_point_bound", matrix);
    summary.push_kv("point_qcrb", spectral);
    summary.push_kv("relative_difference", (matrix - spectral).abs() / spectral);
    for (name, eig) in [("f_quantum", &quantum), ("f_classical", &classical), ("f_total", &total)] {
        let (lo, hi) = range(eig);
        summary.push_kv(&format!("{name}_min_eigenvalue"), lo);
        summary.push_kv(&format!("{name}_max_eigenvalue"), hi);
    }
    let mut out = Outputs::default();
    out.add(cfg, "fisher", "fisher_summary.csv", summary);
    Ok(out)
}
