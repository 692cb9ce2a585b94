//! `tcfwm`: four-wave-mixing maps, level structure and PL fits from the
//! command line. Every run is driven by a JSON config; flags override it.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::{Format, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "tcfwm", version, about = "Exact third-order FWM of quantum dots in a microcavity")]
struct Cli {
    /// run configuration (JSON); the built-in default is used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// working temperature (K)
    #[arg(long, global = true, conflicts_with = "delta")]
    temperature: Option<f64>,
    /// target average detuning (μeV); the temperature is solved for
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// survival time t_s for post-selected 2D maps (ps)
    #[arg(long = "ts", global = true)]
    survival_time: Option<f64>,
    /// phase-correction frequency for the sampled 2D chain (μeV, absolute)
    #[arg(long, global = true)]
    omega_cor: Option<f64>,
    /// output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// worker threads for parallel sections
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complex rung energies and eigenvector weights
    Levels,
    /// Time-resolved and spectrally resolved FWM at one working point
    Fwm,
    /// Two-dimensional FWM maps, closed form and sampled
    Fwm2d,
    /// Fit PL spectra listed in a manifest
    Fit {
        /// manifest JSON: {"spectra": [{"file": ..., "temperature_k": ...}]}
        #[arg(long)]
        pl: PathBuf,
    },
    /// Cross-check the closed form against the master equation
    Verify,
    /// Write synthetic PL spectra and their manifest
    SynthPl,
    /// Print the effective configuration
    Config,
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    let point_from_flags = cli.temperature.is_some() || cli.delta.is_some();
    if point_from_flags {
        cfg.run.temperature = cli.temperature;
        cfg.run.delta = cli.delta;
    }
    if let Some(ts) = cli.survival_time {
        cfg.run.two_d.survival_time = ts;
    }
    if cli.omega_cor.is_some() {
        cfg.run.two_d.omega_cor = cli.omega_cor;
    }
    if let Some(out) = &cli.out {
        cfg.run.output.dir = out.clone();
    }
    if let Some(f) = cli.format {
        cfg.run.output.format = f;
    }
    cfg.validate()?;
    Ok(Context { out: cfg.run.output.dir.clone(), format: cfg.run.output.format, cfg, point_from_flags })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let ctx = context(cli)?;
    match &cli.command {
        Command::Levels => commands::levels::run(&ctx),
        Command::Fwm => commands::fwm::run(&ctx),
        Command::Fwm2d => commands::fwm2d::run(&ctx),
        Command::Fit { pl } => commands::fit::run(&ctx, pl),
        Command::Verify => commands::verify::run(&ctx),
        Command::SynthPl => commands::synth::run(&ctx),
        Command::Config => {
            println!("{}", ctx.cfg.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tcfwm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
