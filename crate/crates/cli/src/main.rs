//! Command-line harness: problem generation with controlled spectra,
//! solver runs with bound monitors, certificate sweeps, and trace/report
//! emission.
//!
//! Exit codes: 0 success, 1 usage or hypothesis error, 2 certificate or
//! bound violation.

mod commands;
mod common;
mod matrix_io;
mod problem;
mod report;
mod trace_files;

use clap::error::ErrorKind;
use clap::Parser;
use grsd_core::certificates::counterexample_hessian;

#[derive(Parser)]
#[command(
    name = "grsd",
    about = "Riemannian steepest descent for leading eigenspaces on the Grassmann manifold",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Run the solver (and optionally the baseline) on one problem.
    Solve(commands::solve::SolveArgs),
    /// Verify the proved inequalities on randomized instances.
    Certify(commands::certify::CertifyArgs),
    /// Run many seeds of the same configuration in parallel.
    Sweep(commands::sweep::SweepArgs),
    /// Evaluate the convexity counterexample Hessian at --eps.
    Counterexample(CounterexampleArgs),
    /// Generate a problem matrix file.
    Gen(commands::gen::GenArgs),
}

#[derive(clap::Args)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            let first_line = e.to_string();
            eprintln!("{}", first_line.lines().next().unwrap_or("usage error"));
            std::process::exit(1);
        }
    };

    let result = match &cli.command {
        Command::Solve(args) => commands::solve::run(args),
        Command::Certify(args) => commands::certify::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Counterexample(args) => counterexample_hessian(args.eps)
            .map(|value| {
                println!("{value}");
                0
            })
            .map_err(Into::into),
        Command::Gen(args) => commands::gen::run(args),
    };

    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{err:#}");
            std::process::exit(1);
        }
    }
}
