//! `psc`: construct, encode, transmit, decode and benchmark k-partial simplex
//! convolutional codes.
//!
//! Exit codes: 0 success, 1 internal failure, 2 usage, 3 parse,
//! 4 verification mismatch, 5 resource limit.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "psc", version, about = "k-partial simplex convolutional codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print G_0..G_μ, n, μ and the closed-form column distances.
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        /// Last column-distance index to print (default ⌊δ/k⌋+2).
        #[arg(long)]
        jmax: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-tail encode a message file, or a seeded random message.
    Encode(EncodeArgs),
    /// Pass a codeword file through a binary symmetric channel.
    Transmit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-likelihood decode a received file.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DecoderChoice::Improved)]
        decoder: DecoderChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare brute-force column distances with the closed form.
    VerifyDistances {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        jmax: Option<usize>,
    },
    /// Run both decoders over seeded noisy trials and report costs.
    Bench {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 100)]
        length: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.01)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct CodeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=psc::MAX_CODE_DIM as i64))]
    k: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=psc::MAX_CODE_DIM as i64))]
    delta: u32,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// Message file; without it a random message is drawn.
    #[arg(long = "in", conflicts_with_all = ["k", "delta", "length", "seed"])]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input", value_parser = clap::value_parser!(u32).range(1..=psc::MAX_CODE_DIM as i64))]
    k: Option<u32>,
    #[arg(long, required_unless_present = "input", value_parser = clap::value_parser!(u32).range(1..=psc::MAX_CODE_DIM as i64))]
    delta: Option<u32>,
    #[arg(long, required_unless_present = "input")]
    length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DecoderChoice {
    Classic,
    Improved,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
