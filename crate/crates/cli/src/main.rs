//! `rd3`: equilibria, Turing onset, Melnikov maps, asymptotic patterns,
//! collocation solves and continuation from the command line.
//!
//! Every subcommand takes an optional `--config FILE` of `key = value`
//! lines followed by `key=value` overrides. Exit codes: 0 success,
//! 2 no solution exists, 3 no convergence, 4 invalid input, 5 i/o.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_pair, parse_text, RunConfig};
use error::{CliError, Result};

#[derive(Parser)]
#[command(name = "rd3", version, about = "Stationary periodic patterns of a three-component reaction-diffusion system")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Flat `key = value` file read before the overrides.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// `key=value` overrides.
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Homogeneous equilibria and their spatial spectra.
    Equilibria(RunArgs),
    /// Turing (Hamiltonian-Hopf) onset against the leading-order curve.
    Turing(RunArgs),
    /// Melnikov root counts over an (A1, B1) grid.
    MelnikovMap(RunArgs),
    /// Sample the asymptotic solution of `thm=1|2|3`.
    Build(RunArgs),
    /// Collocation solve seeded by the asymptotic solution.
    Solve(RunArgs),
    /// Continuation in A from the solved seed.
    Continue(RunArgs),
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_text(&text)?
        }
        None => Vec::new(),
    };
    for s in &args.overrides {
        pairs.push(parse_pair(s)?);
    }
    RunConfig::from_pairs(pairs, std::env::var("RD3_OUT").ok())
}

fn run(cmd: &Cmd) -> Result<()> {
    let (args, f): (&RunArgs, fn(&RunConfig) -> Result<()>) = match cmd {
        Cmd::Equilibria(a) => (a, commands::equilibria_cmd),
        Cmd::Turing(a) => (a, commands::turing_cmd),
        Cmd::MelnikovMap(a) => (a, commands::melnikov_map_cmd),
        Cmd::Build(a) => (a, commands::build_cmd),
        Cmd::Solve(a) => (a, commands::solve_cmd),
        Cmd::Continue(a) => (a, commands::continue_cmd),
    };
    f(&load(args)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors share the invalid-input code; clap's own 2 is taken
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(&cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rd3: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
