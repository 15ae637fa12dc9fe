//! `heavylimits`: simulate heavy-tailed series, build their Poisson-series
//! stable limits, measure M1 distances, and verify distributional convergence.
//!
//! Exit codes: 0 success (and every check passed, for `verify`), 1 failed
//! checks or a mid-run failure, 2 configuration errors, 3 I/O errors.

mod commands;
mod config;
mod error;
mod manifest;
mod pathio;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "heavylimits", version, about)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Overrides the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; defaults to HEAVYLIMITS_THREADS or all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample finite-length series paths and their normalizing sequence.
    Simulate,
    /// Sample limit paths (V, W) and report their characteristic triples.
    Limit {
        /// Double the series point count and report truncation sensitivity.
        #[arg(long)]
        refine: bool,
    },
    /// M1 distance between two path files (CSV with a kind line).
    M1dist {
        a: PathBuf,
        b: PathBuf,
        /// Stop refining when a doubling changes the value by less than this.
        #[arg(long)]
        tol: Option<f64>,
        /// Initial graph resolution of the refinement loop.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Run the finite-sample vs limit verification experiment.
    Verify {
        /// Also write the small-jump and truncated-moment diagnostic tables.
        #[arg(long)]
        diagnostics: bool,
        /// Negative control: offset the reference drift used by the ECF
        /// check, which must then fail.
        #[arg(long, value_name = "OFFSET", allow_hyphen_values = true)]
        inject_drift: Option<f64>,
    },
    /// Write the diagnostic tables alone.
    Diagnostics,
}

fn init_threads(flag: Option<usize>) {
    let from_env = || {
        std::env::var("HEAVYLIMITS_THREADS").ok().and_then(|v| v.parse::<usize>().ok())
    };
    if let Some(n) = flag.or_else(from_env) {
        // A second initialization (possible under `cargo test`) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn load_config(cli: &Cli) -> Result<FileConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::config("--config <FILE> is required for this command"))?;
    FileConfig::load(path, cli.seed)
}

fn out_dir(cli: &Cli) -> Result<&std::path::Path, CliError> {
    cli.out
        .as_deref()
        .ok_or_else(|| CliError::config("--out <DIR> is required for this command"))
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Simulate => commands::cmd_simulate(&load_config(cli)?, out_dir(cli)?),
        Command::Limit { refine } => {
            commands::cmd_limit(&load_config(cli)?, out_dir(cli)?, *refine)
        }
        Command::M1dist { a, b, tol, resolution } => {
            commands::cmd_m1dist(a, b, *tol, *resolution)
        }
        Command::Verify { diagnostics, inject_drift } => {
            commands::cmd_verify(&load_config(cli)?, out_dir(cli)?, *diagnostics, *inject_drift)
        }
        Command::Diagnostics => commands::cmd_diagnostics(&load_config(cli)?, out_dir(cli)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
