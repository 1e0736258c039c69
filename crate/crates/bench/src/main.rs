use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ftpomdp::certify::run_certificate_report;
use ftpomdp::concentration::run_concentration;
use ftpomdp::output::{self, TelemetryFile};
use ftpomdp::runner::run_benchmark;
use ftpomdp::{BenchError, ExperimentConfig, Result};
use ftpomdp_core::bounds::build_ladder;

#[derive(Parser)]
#[command(name = "ftpomdp", version, about = "Run POMDP planning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded episodes and write episodes.csv, summary.json and telemetry.json.
    Bench(RunArgs),
    /// Evaluate the certificate table; runs the benchmark first unless --telemetry is given.
    Certify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        telemetry: Option<PathBuf>,
    },
    /// Tail frequencies of the root value error on the tabular model.
    Concentration(RunArgs),
    /// Build a parameter ladder, check its constraints and print it as JSON.
    ValidateLadder {
        #[arg(long, default_value_t = 2.0)]
        xi0: f64,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 2.0)]
        beta0: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `n_episodes`.
    #[arg(long)]
    episodes: Option<usize>,
    /// Worker threads for episodes; 0 picks one per core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.base_seed = seed;
        }
        if let Some(n) = self.episodes {
            config.n_episodes = n;
        }
        if let Some(dir) = &self.out {
            config.output.dir = dir.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench(args) => {
            let config = args.load()?;
            let result = run_benchmark(&config, args.jobs)?;
            output::write_benchmark(&config, &result, &config.output.dir)?;
            let s = &result.summary;
            println!("{} on {}: mean {:.6} over {} episodes", s.solver, s.env, s.mean, s.n_episodes);
        }
        Command::Certify { run, telemetry } => {
            let config = run.load()?;
            let telemetry = match telemetry {
                Some(path) => TelemetryFile::load(&path)?,
                None => {
                    let result = run_benchmark(&config, run.jobs)?;
                    output::write_benchmark(&config, &result, &config.output.dir)?;
                    TelemetryFile::from_result(&config, &result)
                }
            };
            let report = run_certificate_report(&config, &telemetry)?;
            output::write_json(&config.output.dir, output::CERTIFICATE_JSON, &report)?;
            for row in &report.rows {
                println!("{:.2}\t{:.6}", row.confidence, row.mean_bound);
            }
        }
        Command::Concentration(args) => {
            let config = args.load()?;
            let report = run_concentration(&config)?;
            output::write_json(&config.output.dir, output::CONCENTRATION_JSON, &report)?;
            for e in &report.entries {
                let median = e.quantiles.iter().find(|q| q.q == 0.5).map_or(f64::NAN, |q| q.value);
                println!("n={}\tmedian |V-V*|={:.6}", e.n, median);
            }
        }
        Command::ValidateLadder { xi0, eta, levels, beta0 } => {
            let ladder = build_ladder(xi0, eta, levels, beta0)?;
            let json = serde_json::json!({
                "xi": ladder.xi_all(),
                "alpha": ladder.alpha_all(),
                "kappa": ladder.kappa(),
                "valid": ladder.validate().is_ok(),
                "eta_preserved": ladder.eta_preserved(),
            });
            println!("{}", serde_json::to_string_pretty(&json).map_err(BenchError::from)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
