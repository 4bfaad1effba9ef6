//! `homsim` — command-line front end for the two-photon interference
//! simulator.
//!
//! Subcommands cover the full reproduction pipeline: `lattice-decay` writes
//! the sink-array survival curves and endpoint loss rates, `hom-trace` the
//! delay traces, `visibility-scan` the visibility grid over analysis angle ×
//! birefringent phase, `polarizer-fit` the phase estimate from
//! crossed-polarizer samples, `predict` a single coincidence/visibility
//! record, and `config` the effective settings in canonical form.
//!
//! All settings come from a flat `key = value` config file (see
//! [`config::RunConfig`]); built-in defaults describe the fabricated device,
//! `--set key=value` overrides single keys, and `--out` redirects artifacts.
//! Every subcommand is deterministic: the same inputs produce byte-identical
//! files.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

/// Encoding for single-record artifacts. Data series (curves, traces, grids)
/// are always CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Header line plus one data row.
    Csv,
    /// A flat object with snake_case keys.
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "homsim",
    version,
    about = "Two-photon interference in a lossy birefringent coupler",
    after_help = "Every key in the config file has a built-in default matching the \
                  fabricated device, so all flags and the file itself are optional."
)]
struct Cli {
    /// Config file of `key = value` lines; keys it omits keep their built-in
    /// defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides the config key `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Random seed; overrides the config key `seed`. Reserved for
    /// synthetic-noise workflows — the current subcommands are deterministic.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Encoding for single-record artifacts (predict, polarizer-fit, the
    /// effective-rate summary).
    #[arg(long, global = true, value_enum, value_name = "csv|json")]
    format: Option<Format>,

    /// Override one config key, e.g. `--set predict.theta_deg=18`.
    /// Repeatable; applied on top of the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write survival curves for both polarizations plus the endpoint rate
    /// summary.
    LatticeDecay,
    /// Write one delay-trace CSV per configured analysis angle.
    HomTrace,
    /// Write the visibility grid over the analysis-angle × phase plane.
    VisibilityScan,
    /// Estimate the accumulated birefringent phase from crossed-polarizer
    /// samples.
    PolarizerFit {
        /// Sample CSV with header `phi_rad,ratio`.
        #[arg(long, value_name = "PATH")]
        samples: PathBuf,
    },
    /// Write the coincidence rates and visibility at the configured angle.
    Predict,
    /// Print the effective configuration in canonical form to stdout.
    Config,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?,
        None => String::new(),
    };
    let overrides = cli
        .set
        .iter()
        .map(|assignment| config::parse_override(assignment))
        .collect::<Result<Vec<_>>>()?;
    let mut run = RunConfig::parse_with_overrides(&text, &overrides)?;
    if let Some(seed) = cli.seed {
        run.seed = seed;
    }
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&run.output_dir));

    let written = match &cli.command {
        Command::LatticeDecay => {
            commands::lattice_decay(&run, &out_dir, cli.format.unwrap_or(Format::Json))?
        }
        Command::HomTrace => commands::hom_trace(&run, &out_dir)?,
        Command::VisibilityScan => commands::visibility_scan(&run, &out_dir)?,
        Command::PolarizerFit { samples } => {
            commands::polarizer_fit(samples, &out_dir, cli.format.unwrap_or(Format::Csv))?
        }
        Command::Predict => commands::predict(&run, &out_dir, cli.format.unwrap_or(Format::Json))?,
        Command::Config => {
            print!("{}", run.canonical());
            return Ok(());
        }
    };
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
