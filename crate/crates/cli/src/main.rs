//! Experiment runner: every library operation as a reproducible command
//! driven by a TOML config, emitting tables, SVG plots and a manifest.

mod commands;
mod config;
mod error;
mod manifest;
mod svg;
mod table;

use clap::{Parser, Subcommand, ValueEnum};
use error::CliError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "timecrystal",
    about = "Numerical laboratory for field-coupled pair dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Emit SVG plots.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::On)]
    plot: Toggle,
    /// Worker threads for sweeps (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a trajectory and tabulate all observables.
    Simulate,
    /// Scan an X(0) window for periodic (time-crystal) orbits.
    FindOrbit,
    /// Superimpose four consecutive modulation cells of an orbit.
    UnitCell,
    /// Poincare section on the surface P = 0.
    Poincare,
    /// Largest Lyapunov exponent by two-trajectory renormalization.
    Lyapunov,
    /// Solve the coupled eigenproblem by bracketed shooting.
    Quantum,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::FindOrbit => "find-orbit",
            Command::UnitCell => "unit-cell",
            Command::Poincare => "poincare",
            Command::Lyapunov => "lyapunov",
            Command::Quantum => "quantum",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        // ignore the error if a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let config_text = std::fs::read_to_string(config_path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let cfg = config::parse(&config_text, cli.command.name()).map_err(CliError::Config)?;

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Config(format!("cannot create output directory: {e}")))?;
    let opts = commands::OutputOptions {
        json: matches!(cli.format, Format::Json),
        plot: matches!(cli.plot, Toggle::On),
    };

    let manifest = match cli.command {
        Command::Simulate => commands::cmd_simulate(&cfg, &config_text, &cli.out, &opts)?,
        Command::FindOrbit => commands::cmd_find_orbit(&cfg, &config_text, &cli.out, &opts)?,
        Command::UnitCell => commands::cmd_unit_cell(&cfg, &config_text, &cli.out, &opts)?,
        Command::Poincare => commands::cmd_poincare(&cfg, &config_text, &cli.out, &opts)?,
        Command::Lyapunov => commands::cmd_lyapunov(&cfg, &config_text, &cli.out, &opts)?,
        Command::Quantum => commands::cmd_quantum(&cfg, &config_text, &cli.out, &opts)?,
    };
    manifest
        .save(&cli.out)
        .map_err(|e| CliError::Numerical(format!("cannot write manifest: {e}")))?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
