//! `eigenbound`: evaluate lower bounds for the first Dirichlet eigenvalue,
//! solve discrete eigenproblems, and run the verification suites.

mod bound;
mod config;
mod output;
mod report;
mod solve;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eigenbound::Error;

/// Exit statuses shared by every subcommand.
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "eigenbound", version, about = "Lower bounds for the first Dirichlet eigenvalue, checked against discrete spectra")]
struct Cli {
    /// JSON file with default values for any flag.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Worker threads for independent jobs.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a closed-form bound.
    Bound(bound::BoundArgs),
    /// Solve the discrete Dirichlet eigenproblem on a scenario or mesh file.
    Solve(solve::SolveArgs),
    /// Run verification suites or a single scenario.
    Verify(verify::VerifyArgs),
    /// Merge verification outputs into a regression CSV and plot series.
    Report(report::ReportArgs),
}

/// Maps a library error to an exit status.
pub fn exit_for(err: &Error) -> u8 {
    match err {
        Error::NonConvergence { .. } | Error::LinearSolver(..) => EXIT_NONCONVERGENCE,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let jobs = cli.jobs.or(cfg.jobs);
    let code = match cli.command {
        Command::Bound(a) => bound::run(a, &cfg),
        Command::Solve(a) => solve::run(a, &cfg),
        Command::Verify(a) => verify::run(a, &cfg, jobs),
        Command::Report(a) => report::run(a, &cfg),
    };
    ExitCode::from(code)
}
