mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::Failure;

/// Exact analysis of substitutive and automatic sequences.
#[derive(Parser, Debug)]
#[command(name = "substrata", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Also write the report as JSON, to PATH or (without PATH) to standard
    /// output in place of the text report.
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    pub json: Option<Option<PathBuf>>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Growth, constant length, letter classes, idempotency and transitivity.
    Analyze { file: PathBuf },
    /// A prefix of the coded fixed point.
    Fixpoint {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        length: usize,
    },
    /// The factors of the fixed point (or of the whole subshift) up to a length.
    Factors {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        /// Factors of the subshift X_φ instead of the fixed point.
        #[arg(long)]
        subshift: bool,
    },
    /// Minimal subsystems, transitivity and generators of transitive subsystems.
    Subsystems { file: PathBuf },
    /// The set of n such that v uⁿ w is a factor.
    Occurrences {
        file: PathBuf,
        #[arg(short = 'v', default_value = "")]
        v: String,
        #[arg(short = 'u')]
        u: String,
        #[arg(short = 'w', default_value = "")]
        w: String,
        /// Compare with brute force on [0, N].
        #[arg(long, value_name = "N")]
        verify: Option<u64>,
        /// Intersect with the occurrence set in a second sequence.
        #[arg(long, value_name = "FILE")]
        against: Option<PathBuf>,
        /// Exponent bound for the Diophantine search used by --against.
        #[arg(long, default_value_t = substrata::cobham::DEFAULT_DIOPHANTINE_BOUND)]
        bound: u32,
    },
    /// Common factors of two automatic sequences in independent bases.
    CommonFactors {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Exit with status 3 unless the result is certified.
        #[arg(long)]
        strict: bool,
    },
    /// Build two automatic sequences whose common factors are the given union.
    Construct {
        triples: PathBuf,
        #[arg(short = 'k')]
        k: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(short = 'o', default_value = ".")]
        out: PathBuf,
    },
    /// Check the common factors of two sequences against a union of triples.
    VerifyWitness {
        x: PathBuf,
        y: PathBuf,
        triples: PathBuf,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
