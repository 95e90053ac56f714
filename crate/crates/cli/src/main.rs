use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dpem_cli::{commands, CliError, CliResult, RunConfig};
use dpem_core::Drift;

/// Diffusion piecewise exponential survival models.
#[derive(Parser)]
#[command(name = "dpem", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration field, e.g. `--set sampler.seed=3`.
    #[arg(long = "set", value_name = "PATH=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory; takes precedence over DPEM_OUTPUT_DIR and the config.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the posterior and write draws, curves and a summary.
    Fit,
    /// Simulate hazard paths from the prior.
    PriorSim {
        /// Drift as JSON, e.g. '{"type":"gamma_langevin","shape":2,"rate":7}'; repeatable.
        #[arg(long)]
        drift: Vec<String>,
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Extend posterior draws beyond y+.
    Extrapolate {
        /// Draws file; defaults to draws.csv in the output directory.
        #[arg(long)]
        draws: Option<PathBuf>,
    },
    /// Score fixed values of gamma by PSIS-LOO.
    Loo {
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10,11,12")]
        gammas: Vec<f64>,
    },
    /// Recompute the summary from a draws file.
    Summary {
        #[arg(long)]
        draws: Option<PathBuf>,
    },
    /// Compare posterior mean hazards from the event chain and reversible jump samplers.
    CompareRj {
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
}

fn run(cli: Cli) -> CliResult<String> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = RunConfig::load(&path, &cli.overrides)?;
    let out = cli
        .out
        .or_else(|| std::env::var_os("DPEM_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.dir.clone());
    let draws_or_default = |d: Option<PathBuf>| d.unwrap_or_else(|| out.join("draws.csv"));
    match cli.command {
        Command::Fit => commands::fit(&cfg, &out),
        Command::PriorSim { drift, paths, horizon } => {
            let drifts = drift
                .iter()
                .map(|d| serde_json::from_str::<Drift>(d).map_err(|e| CliError::Config(format!("--drift {d}: {e}"))))
                .collect::<CliResult<Vec<_>>>()?;
            commands::prior_sim(&cfg, &drifts, paths, horizon, &out)
        }
        Command::Extrapolate { draws } => commands::extrapolate(&cfg, &draws_or_default(draws), &out),
        Command::Loo { gammas } => commands::loo(&cfg, &gammas, &out),
        Command::Summary { draws } => commands::summary(&cfg, &draws_or_default(draws), &out),
        Command::CompareRj { points } => commands::compare_rj(&cfg, points, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            // a closed stdout is not an error
            let _ = writeln!(std::io::stdout(), "{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dpem: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
