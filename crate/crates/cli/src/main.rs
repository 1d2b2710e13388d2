//! `enfix`: run the worked examples, verify, solve and diagnose enriched
//! contractions described in TOML config files.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::{Common, Exit};
use config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "enfix", version, about = "Enriched contraction toolkit")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Solver residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Sample count for verify (pairs) or axioms (triples).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Write a JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Grid points for sampled-function spaces.
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the built-in examples and compare with their known outcomes.
    Examples {
        /// Glob over example ids, e.g. `ex3.*`.
        filter: Option<String>,
    },
    /// Certify, sample-verify, then iterate a configured spec.
    Solve { config: PathBuf },
    /// Sample-verify the enriched inequality of a configured spec.
    Verify { config: PathBuf },
    /// Check the class axioms of a catalog comparison function.
    Axioms {
        family: String,
        #[arg(required = true, allow_negative_numbers = true)]
        params: Vec<f64>,
        #[arg(long, default_value = "A")]
        variant: String,
    },
    /// Well-posedness and limit-shadowing checks for a configured spec.
    Diagnose { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = &cli.opts;
    if o.tol.is_some_and(|t| !(t > 0.0))
        || o.grid.is_some_and(|g| g < 2)
        || o.samples == Some(0)
        || o.max_iters == Some(0)
    {
        eprintln!("error: --tol must be positive, --grid at least 2, --samples and --max-iters at least 1");
        return ExitCode::from(Exit::Usage.code());
    }
    let common = Common {
        seed: o.seed,
        overrides: Overrides {
            tol: o.tol,
            max_iters: o.max_iters,
            samples: o.samples,
            grid: o.grid,
        },
        report: o.report.as_deref(),
    };
    let start = Instant::now();
    let exit = match &cli.command {
        Command::Examples { filter } => commands::examples(&common, filter.as_deref()),
        Command::Solve { config } => commands::solve_cmd(&common, config),
        Command::Verify { config } => commands::verify_cmd(&common, config),
        Command::Axioms {
            family,
            params,
            variant,
        } => commands::axioms_cmd(&common, family, params, variant),
        Command::Diagnose { config } => commands::diagnose_cmd(&common, config),
    };
    eprintln!("elapsed {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    ExitCode::from(exit.code())
}
