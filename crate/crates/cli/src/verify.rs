use std::path::PathBuf;

use clap::Args;

use eigenbound::harness::report::{to_csv, to_text};
use eigenbound::harness::{run_selection, RunSelection, Suite};
use eigenbound::{Error, Result};

use crate::config::{FileConfig, SolverFlags};
use crate::output::write_atomic;
use crate::{exit_for, EXIT_INVALID};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// all, calibration, exhaustion, main-lemma, ball, hadamard, hessian or nogo.
    #[arg(long, conflicts_with = "scenario")]
    suite: Option<String>,
    /// A single library scenario, run through all of its checks.
    #[arg(long)]
    scenario: Option<String>,
    /// Ball radius for the scenario.
    #[arg(long)]
    r: Option<f64>,
    /// Comma-separated resolutions replacing every ladder.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    /// Output directory (default: $EIGENBOUND_OUT or ./eigenbound-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the text report on stdout.
    #[arg(long)]
    quiet: bool,
    #[command(flatten)]
    solver: SolverFlags,
}

fn selection(args: &VerifyArgs, cfg: &FileConfig) -> Result<RunSelection> {
    let suite = args.suite.clone().or_else(|| if args.scenario.is_none() { cfg.suite.clone() } else { None });
    let scenario = args.scenario.clone().or_else(|| if suite.is_none() { cfg.scenario.clone() } else { None });
    let mut sel = match (suite, scenario) {
        (Some(s), None) => RunSelection::suite(s.parse::<Suite>()?),
        (None, Some(name)) => RunSelection::scenario(&name, args.r.or(cfg.r)),
        (None, None) => return Err(Error::InvalidArgument("give --suite or --scenario".into())),
        (Some(_), Some(_)) => return Err(Error::InvalidArgument("give only one of --suite or --scenario".into())),
    };
    sel.ladder = args.ladder.clone().or_else(|| cfg.ladder.clone());
    sel.solver = args.solver.resolve(cfg)?;
    Ok(sel)
}

pub fn run(args: VerifyArgs, cfg: &FileConfig, jobs: Option<usize>) -> u8 {
    let sel = match selection(&args, cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if jobs == Some(0) {
        eprintln!("error: --jobs must be >= 1");
        return EXIT_INVALID;
    }
    let run = match run_selection(&sel, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let stem = match (&sel.suite, &sel.scenario) {
        (Some(s), _) => format!("suite-{s}"),
        (_, Some(n)) => match sel.radius {
            Some(r) => format!("scenario-{n}-r{r}"),
            None => format!("scenario-{n}"),
        },
        _ => "run".into(),
    };
    let dir = cfg.out_dir(args.out.clone());
    let header = match serde_json::to_string(&sel) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let text = format!("# config: {header}\n{}", to_text(&run.reports));
    let files = (|| -> Result<()> {
        write_atomic(&dir.join(format!("{stem}.json")), &run.to_json()?)?;
        write_atomic(&dir.join(format!("{stem}.csv")), &to_csv(&run.reports))?;
        write_atomic(&dir.join(format!("{stem}.txt")), &text)?;
        write_atomic(&dir.join(format!("{stem}.timings.json")), &run.timings_json()?)?;
        Ok(())
    })();
    if let Err(e) = files {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    if !args.quiet {
        print!("{text}");
    }
    for r in run.reports.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "{} {} {}: {}",
            r.scenario,
            r.check,
            r.verdict.as_str(),
            r.message.as_deref().unwrap_or("")
        );
    }
    println!("written: {}", dir.join(format!("{stem}.json")).display());
    run.exit_code() as u8
}
