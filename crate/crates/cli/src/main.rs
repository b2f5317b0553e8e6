//! `nlrs`: generate, analyse and construct nearly linear recurrence sequences.
//!
//! Exit codes: 0 success, 1 other failure, 2 precision cap or ambiguous
//! rounding, 3 invalid spec or input.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nlrs_core::{Error, PrecisionPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "nlrs",
    version,
    about = "Certified computations with nearly linear recurrence sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Precision cap in bits; overrides NLRS_PRECISION_CAP.
    #[arg(long, global = true)]
    pub precision_cap: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terms `n, a_n, e_n` of a spec.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Characteristic roots, `β_i` enclosures and residual statistics.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    #[command(subcommand)]
    Construct(Construct),
    #[command(subcommand)]
    Common(Common),
    /// Absolute logarithmic heights of algebraic numbers or of a spec's roots.
    Heights {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "alpha")]
        alphas: Vec<String>,
    },
    /// Continued fraction expansion of a real number.
    Cf {
        #[arg(long)]
        value: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Shift `c` with `|a k - b m - c| < C^-(k+m)` infinitely often.
    Shift {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// `γ` with `|α^k - γβ^m| < C^-(k+m)` infinitely often.
    Gamma {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Coefficient `γ_r` making `Σ γ_j η_j^n` small along a sparse index set.
    Fluctuate {
        #[arg(long = "eta", required = true)]
        etas: Vec<String>,
        #[arg(long = "gamma", required = true)]
        gammas: Vec<String>,
        #[arg(long)]
        d2: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Integer nlrs with infinitely many zeros.
    Zeros {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        eta: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Common {
    /// Pairs `(k, m)` with `a_k = b_m`; pass `--config` twice.
    Search {
        #[arg(long = "config", num_args = 1, required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value_t = 100)]
        kmax: usize,
        #[arg(long, default_value_t = 100)]
        mmax: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Two sequences with infinitely many common terms despite independent roots.
    Counterexample {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Gap constants and their certificate on the solutions found up to `kmax`, `mmax`.
    Gaps {
        #[arg(long = "config", num_args = 1, required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 200)]
        kmax: usize,
        #[arg(long, default_value_t = 200)]
        mmax: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Lower bound for `log|γ_1^{b_1}···γ_t^{b_t} - 1|`.
    Matveev {
        #[arg(long = "gamma", required = true)]
        gammas: Vec<String>,
        #[arg(long = "exponent", required = true, allow_hyphen_values = true)]
        exponents: Vec<String>,
        /// Field-degree bound `D`.
        #[arg(long)]
        degree: Option<u64>,
        /// Bound `B >= max|b_i|`.
        #[arg(long)]
        bound: Option<String>,
        /// Explicit `A_i`, as rationals.
        #[arg(long = "a")]
        a: Vec<String>,
    },
    /// Rational line `k v = u m + w` through pairs given as `k,m`.
    Linefit {
        #[arg(long = "pair", required = true, allow_hyphen_values = true)]
        pairs: Vec<String>,
        /// Number of pairs allowed off the line.
        #[arg(long, default_value_t = 0)]
        tolerance: usize,
    },
}

/// Rendered output plus an exit code for successful runs.
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_precision() {
        2
    } else if e.is_invalid_spec() {
        3
    } else {
        1
    }
}

fn policy(global: &Global) -> PrecisionPolicy {
    let p = PrecisionPolicy::from_env();
    match global.precision_cap {
        Some(cap) => p.with_cap(cap),
        None => p,
    }
}

fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let pol = policy(&cli.global);
    match commands::dispatch(&cli.command, &cli.global, &pol) {
        Ok(out) => {
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, &out.text),
                None => std::io::stdout().write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return 1;
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}
