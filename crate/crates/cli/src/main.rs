mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

const FORMATS: &str = "\
File formats:
  .sfn   step function. First line `total <rational>|inf`, then one
         `<value> <mass>` line per level set, in any order. Rationals are
         written `p/q` or as integers; `#` starts a comment. An optional
         alignment block may follow:
             partition <mass> <mass> ...
             tail <mass> x <count|inf>
         A finite tail count appends that many atoms; `inf` gives an
         unbounded run of atoms of that mass.
  .mat   matrix. First line `rows cols`, then the entries in row-major order
         separated by whitespace.
  <P>    partition file: only the `partition` and `tail` lines.

Exit codes: 0 success or relation holds, 1 relation fails, 2 input error,
3 internal inconsistency (two exact procedures disagreed).";

#[derive(Debug, Parser)]
#[command(name = "majo", version, about = "Exact majorization of step functions and stochastic operators", after_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Rearr,
    Hinge,
    Tail,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the decreasing rearrangement of a step function.
    Rearrange {
        f: PathBuf,
        /// Also report f↓(s) and the partial integral up to s.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Decide f ≺ g (or f ≺_w g with --weak) and print certificates.
    Check {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        criterion: CriterionArg,
        /// Drop the equality clause on the total integrals.
        #[arg(long)]
        weak: bool,
        #[arg(long)]
        json: bool,
        /// When f ≺ g holds, also write a doubly stochastic witness here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        /// Include wall-clock timings in the JSON report.
        #[arg(long)]
        timings: bool,
    },
    /// Build a doubly stochastic D with f = D g for f ≺ g.
    Witness {
        f: PathBuf,
        g: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the equal-mass partition D acts on.
        #[arg(long)]
        partition_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Classify a matrix as none, markov, semi-doubly-stochastic or doubly-stochastic.
    Classify {
        d: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Lift a semi-doubly stochastic matrix to an operator on P-aligned step functions.
    Lift {
        partition: PathBuf,
        d: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Integral kernel of a Markov matrix on a partition, with its marginals.
    Kernel {
        partition: PathBuf,
        d: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Apply a Markov matrix to a step function laid out decreasingly on a partition.
    Apply {
        d: PathBuf,
        f: PathBuf,
        /// Partition file. Defaults to the alignment block of f, or to equal
        /// atoms on a finite space.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Small-set moduli of {S f} against the truncation bound.
    Equi {
        f: PathBuf,
        /// Directory of .mat files, each a semi-doubly stochastic matrix.
        #[arg(long)]
        ops: PathBuf,
        /// `2^-a..2^-b` or a comma-separated list of rationals.
        #[arg(long, default_value = "2^-1..2^-8")]
        delta_grid: String,
        /// Partition file. Defaults as for `apply`.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        timings: bool,
    },
    /// Run the randomized invariant suite.
    Selftest {
        #[arg(long, env = "MAJO_SEED", default_value_t = 0)]
        seed: u64,
        /// Cases per invariant.
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long)]
        json: bool,
    },
}

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Inconsistent(String),
}

impl From<majo_core::Error> for Failure {
    fn from(e: majo_core::Error) -> Self {
        match e {
            majo_core::Error::InternalInconsistency(_) => Failure::Inconsistent(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rearrange { f, at, json } => commands::rearrange(&f, at.as_deref(), json),
        Command::Check {
            f,
            g,
            criterion,
            weak,
            json,
            witness_out,
            timings,
        } => commands::check(&commands::CheckArgs {
            f: &f,
            g: &g,
            criterion,
            weak,
            json,
            witness_out: witness_out.as_deref(),
            timings,
        }),
        Command::Witness {
            f,
            g,
            output,
            partition_out,
            json,
        } => commands::witness(&f, &g, output.as_deref(), partition_out.as_deref(), json),
        Command::Classify { d, json } => commands::classify(&d, json),
        Command::Lift {
            partition,
            d,
            output,
            json,
        } => commands::lift(&partition, &d, output.as_deref(), json),
        Command::Kernel { partition, d, json } => commands::kernel(&partition, &d, json),
        Command::Apply {
            d,
            f,
            partition,
            output,
        } => commands::apply(&d, &f, partition.as_deref(), output.as_deref()),
        Command::Equi {
            f,
            ops,
            delta_grid,
            partition,
            json,
            timings,
        } => commands::equi(&f, &ops, &delta_grid, partition.as_deref(), json, timings),
        Command::Selftest { seed, cases, json } => commands::selftest(seed, cases, json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("internal inconsistency: {msg}");
            ExitCode::from(3)
        }
    }
}
