//! Command-line front end: ingest channel/cost spec documents, run the
//! solvers, sweep power budgets into plot-ready CSV, and run the
//! verification suites.

use clap::{Parser, Subcommand};
use std::path::PathBuf;

pub mod commands;
pub mod spec_doc;

#[derive(Parser)]
#[command(
    name = "capfb",
    version,
    about = "Feedback capacity of channels with memory and transmission cost"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute feedback capacity for one problem document
    Capacity {
        /// Path to a JSON problem document
        #[arg(long)]
        spec: PathBuf,
        /// Solver tolerance (outer tolerance for constrained problems)
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration cap for the iterative solvers
        #[arg(long)]
        max_iter: Option<usize>,
        /// Worker threads for parallel sweeps inside the solvers
        #[arg(long)]
        threads: Option<usize>,
        /// Write the stationary input policy as CSV rows
        /// (state_index,window_symbols,prob_input_0,...)
        #[arg(long)]
        emit_policy: Option<PathBuf>,
    },
    /// Sweep the power budget and write one CSV row per grid point
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Smallest budget on the grid
        #[arg(long)]
        kappa_min: f64,
        /// Largest budget on the grid
        #[arg(long)]
        kappa_max: f64,
        /// Number of grid points (>= 2)
        #[arg(long)]
        steps: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a named verification suite
    /// (gaussian | finite | oracle | variational | all)
    Verify {
        #[arg(long)]
        suite: String,
    },
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // ignore failure: the global pool may already exist
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses arguments and runs the requested command; returns the process exit
/// code (0 ok, 1 verification failure, 2 validation error, 3 non-convergence,
/// 4 ergodicity diagnostic, 5 I/O).
pub fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Capacity {
            spec,
            tol,
            max_iter,
            threads,
            emit_policy,
        } => {
            init_threads(threads);
            commands::cmd_capacity(&spec, tol, max_iter, emit_policy.as_ref())
        }
        Command::Sweep {
            spec,
            kappa_min,
            kappa_max,
            steps,
            out,
            tol,
            max_iter,
            threads,
        } => {
            init_threads(threads);
            commands::cmd_sweep(&spec, kappa_min, kappa_max, steps, &out, tol, max_iter)
        }
        Command::Verify { suite } => commands::cmd_verify(&suite),
    }
}
