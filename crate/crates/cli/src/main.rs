//! `tmab`: command-line access to the library.
//!
//! Exit codes: 0 when every record is ok, 1 when a check fails, 2 on bad usage.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Format, Sink};

#[derive(Debug, Parser)]
#[command(name = "tmab", version, about = "2-abelian complexity of the Thue-Morse word")]
struct Cli {
    /// One JSON object per line instead of a table.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Comma-separated values (sequence commands), for plotting.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prefix of the Thue-Morse word.
    Word {
        #[arg(long)]
        length: usize,
    },
    /// All factors of a given length, sorted.
    Factors {
        #[arg(long)]
        length: usize,
    },
    /// Number of ℓ-abelian classes of factors, for a range of lengths.
    Complexity {
        /// Inclusive range `A..B`, or a single index.
        #[arg(long, value_parser = parse_range)]
        n: (u64, u64),
        /// Order ℓ of the equivalence.
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, value_enum, default_value_t = ComplexityMethod::Fast)]
        method: ComplexityMethod,
    },
    /// Pair-count intervals for a range of lengths.
    Pairs {
        #[arg(long, value_parser = parse_range)]
        n: (u64, u64),
        #[arg(long, value_enum, default_value_t = PairsMethod::Interval)]
        method: PairsMethod,
    },
    /// Maximal extensible reading frame of a factor.
    Merf {
        #[arg(value_parser = parse_word)]
        word: tmab::Word,
        /// Show every fill / preimage step.
        #[arg(long)]
        trace: bool,
    },
    /// Bounds on the number of letters a factor forces.
    Bounds {
        #[arg(long)]
        length: u64,
    },
    /// Short coding of a factor in its odd frame.
    Coding {
        #[arg(value_parser = parse_word)]
        word: tmab::Word,
    },
    /// Word with the given short coding and first letter.
    Decode {
        coding: String,
        #[arg(value_parser = clap::value_parser!(u8).range(0..=1))]
        first: u8,
    },
    /// Numerical checks of structural properties.
    Verify(VerifyArgs),
    /// Terms of the unbounded chain 3, 43, 683, ...
    Witness {
        #[arg(long)]
        steps: usize,
    },
    /// Search for linear relations between kernel subsequences.
    Discover {
        #[arg(long, default_value_t = 512)]
        n_max: u64,
        #[arg(long, default_value_t = 16)]
        modulus: u64,
        /// Largest number of terms in a reported relation.
        #[arg(long, default_value_t = 8)]
        max_terms: usize,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(subcommand)]
    what: Verify,
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// The thirteen kernel relations.
    Relations {
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = EvaluatorKind::Fast)]
        evaluator: EvaluatorKind,
    },
    /// Mirror symmetry of the blocks between consecutive powers of two.
    Palindromes {
        #[arg(long)]
        q_max: u32,
    },
    /// Steps of size -2, 0 or 2 from n = 4 on.
    Steps {
        #[arg(long)]
        n_max: u64,
    },
    /// Residues mod 32 covered by the relations, and closure of the basis.
    Coverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexityMethod {
    Fast,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairsMethod {
    Interval,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvaluatorKind {
    Fast,
    Brute,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let num = |x: &str| {
        x.trim()
            .parse::<u64>()
            .map_err(|_| format!("{x:?} is not a nonnegative integer"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_word(s: &str) -> Result<tmab::Word, String> {
    s.parse().map_err(|e: tmab::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Table
    };
    let mut sink = Sink::stdout(format);
    match commands::run(cli.command, &mut sink) {
        Ok(()) => {
            if sink.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(commands::Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
