use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use forcebound_cli::{
    run_bound, run_estimate, run_fisher, run_montecarlo, run_simulate, with_threads, Estimator, ExperimentConfig,
    FisherPath, Outputs, Result,
};

/// Quantum limits on force waveform estimation with a monitored oscillator.
#[derive(Debug, Parser)]
#[command(name = "forcebound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV tables.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Number of Monte Carlo trials (overrides the config).
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "FORCEBOUND_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound spectra, SQL and the point-error bound.
    Bound(Common),
    /// Write one simulated trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Trial index within the seed's stream family.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Simulate one trajectory and estimate the force.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// `wiener` (frequency domain) or `rts` (Kalman + RTS smoother).
        #[arg(long, default_value = "wiener")]
        estimator: Estimator,
    },
    /// Monte Carlo campaign of simulated records and Wiener smoothing.
    Montecarlo(Common),
    /// Matrix-form bound and Fisher eigenvalue diagnostics.
    Fisher {
        #[command(flatten)]
        common: Common,
        /// Use circulant generators instead of dense matrices (no size cap).
        #[arg(long)]
        circulant: bool,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Bound(c) | Command::Montecarlo(c) => c,
            Command::Simulate { common, .. } | Command::Estimate { common, .. } | Command::Fisher { common, .. } => common,
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let common = cli.command.common();
    let cfg = ExperimentConfig::load(&common.config, common.trials, common.seed)?;
    for d in &cfg.diagnostics {
        eprintln!("warning: {d}");
    }
    let started = Instant::now();
    let outputs: Outputs = with_threads(common.threads, || match &cli.command {
        Command::Bound(_) => run_bound(&cfg),
        Command::Simulate { trial, .. } => run_simulate(&cfg, *trial),
        Command::Estimate { trial, estimator, .. } => run_estimate(&cfg, *trial, *estimator),
        Command::Montecarlo(_) => run_montecarlo(&cfg).map(|(out, _)| out),
        Command::Fisher { circulant, .. } => run_fisher(
            &cfg,
            if *circulant {
                FisherPath::Circulant
            } else {
                FisherPath::Dense
            },
        ),
    })??;
    outputs.write_all(&common.out)?;
    eprintln!(
        "wrote {} file(s) to {} in {:.2}s (config {}, seed {})",
        outputs.files.len(),
        common.out.display(),
        started.elapsed().as_secs_f64(),
        cfg.hash(),
        cfg.seed
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
