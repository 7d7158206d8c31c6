//! `heralded`: command-line runs of the heralded-photon simulation toolkit.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::commands::*;
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};
use crate::output::Context;

#[derive(Parser)]
#[command(name = "heralded", version, about = "Seeded simulations of heralded multi-photon experiments")]
struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with default parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Permanent of a square matrix.
    Permanent(PermanentArgs),
    /// Boson sampling from a fixed input.
    Sample(SampleArgs),
    /// Scattershot boson sampling with heralded sources.
    Scattershot(ScattershotArgs),
    /// GHZ measurement campaign and fidelity witness.
    Ghz(GhzArgs),
    /// Two-photon interference dip.
    Hom(HomArgs),
    /// Gaussian joint spectral amplitude and its purity.
    Jsa(JsaArgs),
    /// Validate a sample log against the indistinguishable-photon model.
    Validate(ValidateArgs),
    /// Closed-form event rates.
    Rates(RatesArgs),
}

fn merged<T: Serialize + DeserializeOwned>(config: &ConfigFile, name: &str, flags: T) -> CliResult<T> {
    config.resolve(name, &flags)
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = cli.seed.or(config.seed()?).unwrap_or(0);
    let threads = match cli.threads.or(config.threads()?) {
        Some(0) => return Err(CliError::contract("--threads must be at least 1")),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let out = cli.out.or(config.out()?);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::contract(format!("thread pool: {e}")))?;
    let ctx = Context { seed, threads, out, config };
    let c = &ctx.config;
    match cli.command {
        Command::Permanent(a) => permanent(merged(c, "permanent", a)?, &ctx),
        Command::Sample(a) => sample(merged(c, "sample", a)?, &ctx),
        Command::Scattershot(a) => scattershot(merged(c, "scattershot", a)?, &ctx),
        Command::Ghz(a) => ghz(merged(c, "ghz", a)?, &ctx),
        Command::Hom(a) => hom(merged(c, "hom", a)?, &ctx),
        Command::Jsa(a) => jsa(merged(c, "jsa", a)?, &ctx),
        Command::Validate(a) => validate(merged(c, "validate", a)?, &ctx),
        Command::Rates(a) => rates(merged(c, "rates", a)?, &ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heralded: {e}");
            ExitCode::from(e.code)
        }
    }
}
