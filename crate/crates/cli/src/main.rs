//! `twobase`: count, list and check additive 2-bases from the command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 limit exceeded,
//! 3 verification failure, 4 parse error.

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "twobase", version, about = "Exact counts and bound checks for additive 2-bases")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count the 2-bases for n and print the record as JSON.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Dfs)]
        method: MethodArg,
        /// DFS shards are 2^depth subtrees.
        #[arg(long, default_value_t = 8)]
        partition_depth: usize,
    },
    /// List every 2-base for n, one per line.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Write the growth table for 0..=n-max as CSV.
    Table {
        #[arg(long)]
        n_max: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimates with exact reference values.
    Mc {
        #[arg(value_enum)]
        kind: McKind,
        #[arg(long)]
        n: usize,
        /// Target for `notgen`.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
        #[arg(long)]
        samples: u64,
    },
    /// Run one family of checks and report pass/fail per item.
    Verify {
        #[arg(value_enum)]
        which: verify::Which,
        /// Single n (sets both ends of the range).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        min_n: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        /// Base points for `chain`.
        #[arg(long = "base", default_values_t = [0usize, 5])]
        bases: Vec<usize>,
        /// Window length past n0 for `bounds`.
        #[arg(long, default_value_t = 10_000)]
        window: usize,
    },
    /// Exact evaluation of the error term t(n).
    Bounds {
        #[command(subcommand)]
        what: BoundsCommand,
    },
    /// Compare local counts with an OEIS b-file.
    OeisCheck {
        #[arg(long)]
        bfile: PathBuf,
        /// Do not compute beyond this n even if ceilings allow it.
        #[arg(long)]
        max_n: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// `{n, t_squared_num, t_squared_den, le_tenth, decay_ok}`
    Eval {
        #[arg(long)]
        n: usize,
    },
    /// `{n0, first_decay_n}`
    N0,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Brute,
    Dfs,
}

impl From<MethodArg> for twobase::Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => twobase::Method::Brute,
            MethodArg::Dfs => twobase::Method::Dfs,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum McKind {
    Uncovered,
    Notgen,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.config;
    let result = match cli.command {
        Command::Count {
            n,
            method,
            partition_depth,
        } => commands::count(cfg, n, method.into(), partition_depth),
        Command::Enumerate { n } => commands::enumerate(cfg, n),
        Command::Table { n_max, out } => commands::table(cfg, n_max, out.as_deref()),
        Command::Mc {
            kind,
            n,
            k,
            samples,
        } => commands::mc(cfg, kind, n, k, samples),
        Command::Verify {
            which,
            n,
            min_n,
            max_n,
            bases,
            window,
        } => verify::run(
            cfg,
            which,
            verify::Range::new(n, min_n, max_n),
            &bases,
            window,
        ),
        Command::Bounds { what } => match what {
            BoundsCommand::Eval { n } => commands::bounds_eval(n),
            BoundsCommand::N0 => commands::bounds_n0(),
        },
        Command::OeisCheck { bfile, max_n } => commands::oeis_check(cfg, &bfile, max_n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
