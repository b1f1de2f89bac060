//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or domain error, 1 internal integrality
//! failure or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::cache;
use crate::error::{Error, Result};
use crate::exact_arith::primes_up_to;
use crate::record::{evaluate, render, Format, OutputRecord, Query};

#[derive(Debug, Parser)]
#[command(
    name = "abvar",
    version,
    about = "Exact isogeny class counts for abelian varieties over finite fields"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Class number cache file (`D<TAB>h` lines). Overrides ABVAR_CACHE.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Size of an isogeny class.
    #[command(subcommand)]
    Census(CensusCommand),

    /// Class number of a quadratic order or real quadratic field.
    ClassNumber {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        /// Treat --disc as a fundamental discriminant and use this conductor.
        #[arg(long)]
        conductor: Option<u64>,
    },

    /// ζ_F(-1) of a real quadratic field.
    Zeta {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
    },

    /// Fundamental unit of Q(√p) and its unit-index symbols.
    Unit {
        #[arg(long)]
        p: u64,
    },

    /// Principal genus count of a product of imaginary quadratic fields.
    Genus {
        /// Comma-separated negative fundamental discriminants.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        disc: Vec<i64>,
    },

    /// Evaluate a census over a range of primes.
    #[command(subcommand)]
    Sweep(SweepCommand),
}

#[derive(Debug, Subcommand)]
enum CensusCommand {
    /// π = ±√(p^a), a odd.
    SqrtQ {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
    },
    /// π = ±√(p^a), a even.
    Even {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
    },
    /// π = √(-p).
    SqrtMinusP {
        #[arg(long)]
        p: u64,
    },
    /// Divisor chain sum over orders of an imaginary quadratic field.
    Chain {
        #[arg(long)]
        p: u64,
        /// Fundamental discriminant of Q(π).
        #[arg(long = "d0", allow_negative_numbers = true)]
        d0: i64,
        /// Prime-to-p part of the conductor of Z[π].
        #[arg(long = "D")]
        big_d: u64,
        /// Dimension.
        #[arg(long)]
        n: u32,
        /// Comma-separated p-power exponents a_i.
        #[arg(long = "a-list", value_delimiter = ',', required = true)]
        a_list: Vec<u32>,
    },
}

#[derive(Debug, Subcommand)]
enum SweepCommand {
    /// census sqrt-q for every prime p <= p-max.
    SqrtQ {
        #[arg(long = "p-max")]
        p_max: u64,
        #[arg(long)]
        a: u32,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Cache(_) => 2,
        Error::Integrality(_) | Error::Io(_) => 1,
    }
}

fn single_query(command: Command) -> Option<Query> {
    Some(match command {
        Command::Census(c) => match c {
            CensusCommand::SqrtQ { p, a } => Query::CensusSqrtQ { p, a },
            CensusCommand::Even { p, a } => Query::CensusEven { p, a },
            CensusCommand::SqrtMinusP { p } => Query::CensusSqrtMinusP { p },
            CensusCommand::Chain {
                p,
                d0,
                big_d,
                n,
                a_list,
            } => Query::CensusChain {
                p,
                d0,
                d: big_d,
                n,
                a_list,
            },
        },
        Command::ClassNumber { disc, conductor } => Query::ClassNumber { disc, conductor },
        Command::Zeta { disc } => Query::Zeta { disc },
        Command::Unit { p } => Query::Unit { p },
        Command::Genus { disc } => Query::Genus { discs: disc },
        Command::Sweep(_) => return None,
    })
}

/// One record per prime, in ascending order whatever the evaluation order.
pub fn sweep_sqrt_q(p_max: u64, a: u32) -> Result<Vec<OutputRecord>> {
    if a.is_multiple_of(2) {
        return Err(Error::domain(format!("exponent a = {a} must be odd")));
    }
    primes_up_to(p_max)
        .into_par_iter()
        .map(|p| evaluate(&Query::CensusSqrtQ { p, a }))
        .collect()
}

fn execute(cli: Cli) -> Result<String> {
    let format = cli.format;
    match cli.command {
        Command::Sweep(SweepCommand::SqrtQ { p_max, a }) => {
            let records = sweep_sqrt_q(p_max, a)?;
            Ok(render(&records, format, false))
        }
        other => {
            let query = single_query(other).expect("non-sweep command");
            let record = evaluate(&query)?;
            Ok(render(&[record], format, true))
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };

    let cache_path = cache::resolve_path(cli.cache.as_deref());
    if let Some(path) = &cache_path {
        if let Err(e) = cache::global().load(path) {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    }

    let code = match execute(cli) {
        Ok(text) => {
            if let Err(e) = out.write_all(text.as_bytes()) {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    };

    if let Some(path) = &cache_path {
        if let Err(e) = cache::global().save(path) {
            let _ = writeln!(err, "error: writing cache: {e}");
            return if code == 0 { 1 } else { code };
        }
    }
    code
}
