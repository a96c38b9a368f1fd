//! `qwindow` — batch front-end for the constrained-window quantization
//! toolkit. A single JSON config drives reduced-bracket tables, singularity
//! classification, series solves, spectrum sweeps, and boundary-condition
//! reports, rendered deterministically as CSV or JSON.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ConfigError;
use crate::error::CliError;
use crate::table::Format;

#[derive(Parser)]
#[command(name = "qwindow", version, about)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format override (config: output.format).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file override (config: output.path); stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Abort with exit code 4 if the two ε-chart coefficient routes disagree
    /// beyond solver.strict_tol.
    #[arg(long, global = true)]
    strict: bool,
    /// Pin the quantum number range to a single l.
    #[arg(long, global = true)]
    l: Option<u32>,
    /// Override the truncation / series order.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced commutator table with numeric spot evaluations.
    Brackets,
    /// Classify ε-chart points (default: 0 and 1).
    Classify {
        #[arg(value_name = "EPS", allow_negative_numbers = true)]
        points: Vec<f64>,
    },
    /// Compare the series solution against adaptive integration on a grid.
    Solve,
    /// Sweep the truncated determinant spectrum.
    Spectrum,
    /// Boundary-condition residuals on the window profile.
    EtaConditions,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| ConfigError::at("config", "--config <PATH> is required"))?;
    let mut cfg = config::load(&config_path)?;
    cfg.apply_overrides(cli.l, cli.order);
    cfg.validate()?;
    let profile = cfg.profile.build()?;

    let needs_epsilon_chart = !matches!(cli.command, Command::Brackets);
    if cli.strict && needs_epsilon_chart {
        commands::strict_check(&cfg, &profile)?;
    }

    let table = match &cli.command {
        Command::Brackets => commands::brackets(&cfg, &profile)?,
        Command::Classify { points } => commands::classify(&cfg, &profile, points)?,
        Command::Solve => commands::solve(&cfg, &profile)?,
        Command::Spectrum => commands::spectrum(&cfg, &profile)?,
        Command::EtaConditions => commands::eta_conditions(&cfg, &profile)?,
    };

    let format = cli.format.unwrap_or(cfg.output.format);
    let text = table.render(format, cfg.output.precision);
    match cli.out.or_else(|| cfg.output.path.clone()) {
        Some(path) => std::fs::write(&path, text).map_err(|e| {
            CliError::Config(ConfigError::at(
                "output.path",
                format!("cannot write {}: {e}", path.display()),
            ))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
