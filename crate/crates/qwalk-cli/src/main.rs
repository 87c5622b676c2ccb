//! `qwalk`: drive the hypercube search walks from the command line.
//!
//! Four subcommands: `distribution` dumps a final probability distribution,
//! `protocol` benchmarks a search protocol exactly or by sampling, `sweep`
//! tabulates success and query counts across dimensions, and `verify` runs
//! an invariant suite. Identical arguments and seed produce byte-identical
//! output. Exit codes: 0 success, 1 failed verification checks, 2 usage.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Quantum-walk search on hypercubes: distributions, protocols, sweeps, invariants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the vertex distribution after running a walk
    Distribution(DistributionArgs),
    /// Evaluate a search protocol, exactly or over sampled trials
    Protocol(ProtocolArgs),
    /// Tabulate stopping times, success probabilities, and query counts over a range of n
    Sweep(SweepArgs),
    /// Run an invariant check suite; nonzero exit if any check fails
    Verify(VerifyArgs),
}

/// Walk family behind an experiment.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    /// Plain search walk measured at the stopping time
    Skw,
    /// Search walk accepting the measured vertex or any neighbour
    Neighbour,
    /// Search walk measured jointly with the coin at an odd time
    CoinMeasure,
    /// Two-coin walk on the doubled cube (one extra vertex bit)
    Optimal,
    /// Storage-reduced form of `optimal`: original cube, self-loop coin
    OptimalReduced,
    /// Self-loop walk with several marked vertices
    Multi,
}

#[derive(Args)]
struct DistributionArgs {
    /// Walk family to evolve
    #[arg(long, value_enum, default_value_t = Algorithm::Skw)]
    algorithm: Algorithm,
    /// Hypercube dimension
    #[arg(long)]
    n: u32,
    /// Marked vertices: comma-separated labels, or "random:m"
    #[arg(long, default_value = "0")]
    targets: String,
    /// Steps (pair count for the two-coin walks), or "auto" for the stopping time
    #[arg(long, default_value = "auto")]
    steps: String,
    /// Seed used when targets are drawn at random
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path, or "-" for stdout
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    /// Hypercube dimension
    #[arg(long)]
    n: u32,
    /// Marked vertices: comma-separated labels, or "random:m"
    #[arg(long, default_value = "0")]
    targets: String,
    /// Monte-Carlo trials (sample mode)
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Seed; trial i draws from substream i
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact probabilities, or sampled trials
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Restart cap for the repeat-until-success protocol
    #[arg(long, default_value_t = 32)]
    max_runs: u64,
    /// Output path, or "-" for stdout
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Inclusive dimension range, e.g. "5..12", or a single value
    #[arg(long)]
    n: String,
    /// Output path, or "-" for stdout
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check suite to run
    #[arg(value_enum)]
    suite: Suite,
    /// Dimension ceiling (suite-specific default when omitted)
    #[arg(long)]
    n: Option<u32>,
    /// Seed for the randomized probes
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Sample,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// Per-shell probability inequalities and step-parity equalities
    ShellInequalities,
    /// Subspace swap, odd-to-even start identity, exact factor 2
    Parity,
    /// Doubled-cube alternation, bit-flip symmetry, self-loop marginals
    TwoCoinIdentities,
    /// Everything above
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Distribution(args) => commands::distribution(&args),
        Command::Protocol(args) => commands::protocol(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match result {
        Ok(code) => code,
        // A closed pipe (e.g. piping into head) is not an error.
        Err(err)
            if err
                .downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
