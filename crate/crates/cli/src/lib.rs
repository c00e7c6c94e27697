//! Experiment runner for `forcebound`: configuration, Monte Carlo campaigns
//! and CSV reports.

pub mod campaign;
pub mod config;
pub mod error;
pub mod report;

pub use campaign::{run_bound, run_estimate, run_fisher, run_montecarlo, run_simulate, Estimator, FisherPath, Outputs};
pub use config::ExperimentConfig;
pub use error::{CliError, Result};

/// Runs `f` on a rayon pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
