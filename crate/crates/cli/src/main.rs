use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sepfact_cli::{run, Command, RunConfig, EPS_RANK_ENV};
use sepfact_core::Dims;

/// Unique pure-product decompositions of separable two-party states.
#[derive(Debug, Parser)]
#[command(name = "sepfact", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Input file (ensemble, matrix or word JSON, depending on the command).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Report file; standard output if omitted.
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative singular-value cutoff; overrides SEPFACT_EPS_RANK.
    #[arg(long = "eps-rank")]
    eps_rank: Option<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Local dimensions as MxN.
    #[arg(long)]
    dims: Option<Dims>,
    #[arg(long)]
    k: Option<usize>,
    /// Write a histogram of certificate margins (sample only).
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let eps_rank = match args.eps_rank {
        Some(x) => Some(x),
        None => match std::env::var(EPS_RANK_ENV) {
            Ok(s) => match s.trim().parse::<f64>() {
                Ok(x) => Some(x),
                Err(_) => {
                    eprintln!("error: invalid input at `{EPS_RANK_ENV}`: {s:?} is not a number");
                    return ExitCode::from(1);
                }
            },
            Err(_) => None,
        },
    };
    let config = RunConfig {
        command: args.command,
        input_path: args.input,
        output_path: args.output,
        seed: args.seed,
        eps_rank,
        sample_count: args.count as usize,
        dims: args.dims,
        k: args.k,
        svg_path: args.svg,
    };
    ExitCode::from(run(&config) as u8)
}
