//! Suites of verification jobs, run in parallel with a deterministic output order.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpaceForm;
use crate::harness::report::{EigenBoundReport, Verdict};
use crate::harness::scenario::{library, lookup, CheckKind, Scenario};
use crate::harness::verify::{
    euclidean_nogo_scan, main_lemma_report, verify_ball_theorem, verify_calibration, verify_exhaustion,
    verify_hadamard_corollary, verify_hessian_comparison, FieldKind,
};
use crate::spectral::EigenOptions;

pub const MAIN_LEMMA_LADDER: [usize; 3] = [25, 50, 100];
pub const NOGO_LADDER: [usize; 3] = [25, 50, 100];
pub const NOGO_RADII: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
pub const POSITION_FIELD_RADII: [f64; 3] = [1.0, 2.0, 4.0];
pub const HESSIAN_SAMPLES: usize = 100;
pub const HESSIAN_SEED: u64 = 0x4e55;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Calibration,
    Exhaustion,
    MainLemma,
    Ball,
    Hadamard,
    Hessian,
    Nogo,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::All,
        Suite::Calibration,
        Suite::Exhaustion,
        Suite::MainLemma,
        Suite::Ball,
        Suite::Hadamard,
        Suite::Hessian,
        Suite::Nogo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Calibration => "calibration",
            Suite::Exhaustion => "exhaustion",
            Suite::MainLemma => "main-lemma",
            Suite::Ball => "ball",
            Suite::Hadamard => "hadamard",
            Suite::Hessian => "hessian",
            Suite::Nogo => "nogo",
        }
    }

    fn check(&self) -> Option<CheckKind> {
        Some(match self {
            Suite::All => return None,
            Suite::Calibration => CheckKind::Calibration,
            Suite::Exhaustion => CheckKind::Exhaustion,
            Suite::MainLemma => CheckKind::MainLemma,
            Suite::Ball => CheckKind::Ball,
            Suite::Hadamard => CheckKind::Hadamard,
            Suite::Hessian => CheckKind::Hessian,
            Suite::Nogo => CheckKind::Nogo,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

/// What to run. Serialized verbatim as the header of every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSelection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Overrides the scenario radius (single-scenario mode only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Overrides every ladder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<usize>>,
    pub solver: EigenOptions,
}

impl RunSelection {
    pub fn suite(suite: Suite) -> Self {
        RunSelection { suite: Some(suite), scenario: None, radius: None, ladder: None, solver: EigenOptions::default() }
    }

    pub fn scenario(name: &str, radius: Option<f64>) -> Self {
        RunSelection {
            suite: None,
            scenario: Some(name.to_string()),
            radius,
            ladder: None,
            solver: EigenOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
enum Job {
    Calibration(Scenario),
    Exhaustion(Scenario),
    MainLemma(Scenario, FieldKind, Vec<usize>),
    Ball(Scenario),
    Hadamard(Scenario, Vec<f64>),
    Hessian(SpaceForm),
    Nogo(Vec<usize>),
}

impl Job {
    fn label(&self) -> String {
        match self {
            Job::Calibration(s) => format!("calibration:{}", s.name),
            Job::Exhaustion(s) => format!("exhaustion:{}", s.name),
            Job::MainLemma(s, f, _) => format!("main-lemma:{}:{}:r={}", s.name, f.as_str(), s.radius().unwrap_or(0.0)),
            Job::Ball(s) => format!("ball:{}", s.name),
            Job::Hadamard(s, _) => format!("hadamard:{}", s.name),
            Job::Hessian(n) => format!("hessian:K={}", n.curvature),
            Job::Nogo(_) => "nogo:euclidean-disk".into(),
        }
    }

    fn scenario(&self) -> Option<&Scenario> {
        match self {
            Job::Calibration(s) | Job::Exhaustion(s) | Job::Ball(s) | Job::MainLemma(s, ..) | Job::Hadamard(s, _) => Some(s),
            _ => None,
        }
    }

    fn run(&self, opts: EigenOptions) -> Vec<EigenBoundReport> {
        match self {
            Job::Calibration(s) => vec![verify_calibration(s, opts)],
            Job::Exhaustion(s) => vec![verify_exhaustion(s, opts)],
            Job::MainLemma(s, f, ladder) => vec![main_lemma_report(s, *f, ladder, opts)],
            Job::Ball(s) => vec![verify_ball_theorem(s, opts)],
            Job::Hadamard(s, radii) => verify_hadamard_corollary(s, radii, opts),
            Job::Hessian(n) => vec![verify_hessian_comparison(n, HESSIAN_SAMPLES, HESSIAN_SEED)],
            Job::Nogo(ladder) => euclidean_nogo_scan(
                &[FieldKind::Position, FieldKind::RadialUnit, FieldKind::Constant],
                &NOGO_RADII,
                ladder,
                opts,
            ),
        }
    }
}

fn with_ladder(mut sc: Scenario, ladder: &Option<Vec<usize>>) -> Scenario {
    if let Some(l) = ladder {
        sc.ladder = l.clone();
    }
    sc
}

fn scenario_jobs(sc: &Scenario, only: Option<CheckKind>, sel: &RunSelection) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    let ladder = &sel.ladder;
    let main_ladder = ladder.clone().unwrap_or_else(|| MAIN_LEMMA_LADDER.to_vec());
    for &check in &sc.checks {
        if only.is_some_and(|c| c != check) {
            continue;
        }
        let s = with_ladder(sc.clone(), ladder);
        match check {
            CheckKind::Calibration => jobs.push(Job::Calibration(s)),
            CheckKind::Exhaustion => jobs.push(Job::Exhaustion(s)),
            CheckKind::MainLemma => {
                jobs.push(Job::MainLemma(s.clone(), FieldKind::DistanceGradient, main_ladder.clone()));
                if s.name == "euclidean-disk" && sel.radius.is_none() {
                    for r in POSITION_FIELD_RADII {
                        jobs.push(Job::MainLemma(s.with_radius(r)?, FieldKind::Position, main_ladder.clone()));
                    }
                    jobs.push(Job::MainLemma(s.clone(), FieldKind::Constant, main_ladder.clone()));
                }
            }
            CheckKind::Ball => jobs.push(Job::Ball(s)),
            CheckKind::Hadamard => {
                let radii = match (sel.radius, &s.hadamard) {
                    (Some(r), _) => vec![r],
                    (None, Some(h)) => h.radii.clone(),
                    (None, None) => Vec::new(),
                };
                jobs.push(Job::Hadamard(s, radii));
            }
            CheckKind::Hessian | CheckKind::Nogo => {}
        }
    }
    Ok(jobs)
}

fn suite_jobs(suite: Suite, sel: &RunSelection) -> Result<Vec<Job>> {
    let order = [
        Suite::Calibration,
        Suite::Exhaustion,
        Suite::MainLemma,
        Suite::Ball,
        Suite::Hadamard,
        Suite::Hessian,
        Suite::Nogo,
    ];
    let lib = library()?;
    let mut jobs = Vec::new();
    for part in order {
        if suite != Suite::All && suite != part {
            continue;
        }
        match part {
            Suite::Hessian => {
                for k in [-1.0, 0.0, 1.0] {
                    jobs.push(Job::Hessian(SpaceForm::new(3, k)?));
                }
            }
            Suite::Nogo => jobs.push(Job::Nogo(sel.ladder.clone().unwrap_or_else(|| NOGO_LADDER.to_vec()))),
            _ => {
                for sc in &lib {
                    jobs.extend(scenario_jobs(sc, part.check(), sel)?);
                }
            }
        }
    }
    Ok(jobs)
}

/// Wall-clock time of one job. Kept out of the reports so that those stay
/// byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub job: String,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub selection: RunSelection,
    pub reports: Vec<EigenBoundReport>,
    pub timings: Vec<Timing>,
}

impl SuiteRun {
    pub fn exit_code(&self) -> i32 {
        crate::harness::report::exit_code(&self.reports)
    }

    pub fn all_ok(&self) -> bool {
        self.reports.iter().all(EigenBoundReport::is_ok)
    }

    /// Reports with the selection as a header. Contains no timings.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Out<'a> {
            config: &'a RunSelection,
            reports: &'a [EigenBoundReport],
        }
        Ok(serde_json::to_string_pretty(&Out { config: &self.selection, reports: &self.reports })?)
    }

    pub fn timings_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.timings)?)
    }
}

/// Runs a suite or a single scenario. In suite mode, rejections a scenario
/// declares as expected count as passing; a single scenario reports them
/// like any other rejection.
///
/// `threads = None` uses the global rayon pool.
pub fn run_selection(sel: &RunSelection, threads: Option<usize>) -> Result<SuiteRun> {
    if let Some(l) = &sel.ladder {
        if l.is_empty() || l.windows(2).any(|w| w[1] <= w[0]) || l[0] < 4 {
            return Err(Error::InvalidArgument("ladder must be strictly increasing with entries >= 4".into()));
        }
    }
    let (jobs, expect) = match (&sel.suite, &sel.scenario) {
        (Some(suite), None) => {
            if sel.radius.is_some() {
                return Err(Error::InvalidArgument("a radius override needs a single scenario".into()));
            }
            (suite_jobs(*suite, sel)?, true)
        }
        (None, Some(name)) => {
            let mut sc = lookup(name)?;
            if let Some(r) = sel.radius {
                sc = sc.with_radius(r)?;
            }
            let jobs = scenario_jobs(&sc, None, sel)?;
            if jobs.is_empty() {
                return Err(Error::InvalidArgument(format!("scenario `{name}` has no runnable checks")));
            }
            (jobs, false)
        }
        _ => return Err(Error::InvalidArgument("select exactly one of a suite or a scenario".into())),
    };
    let opts = sel.solver;
    let work = || -> Vec<(Vec<EigenBoundReport>, Timing)> {
        jobs.par_iter()
            .map(|job| {
                let start = Instant::now();
                let mut reports = job.run(opts);
                if let (true, Some(sc)) = (expect, job.scenario()) {
                    for r in &mut reports {
                        r.expected_rejection = r.verdict == Verdict::Rejected
                            && sc.expected_rejections.iter().any(|c| c.as_str() == r.check);
                    }
                }
                (reports, Timing { job: job.label(), seconds: start.elapsed().as_secs_f64() })
            })
            .collect()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut reports = Vec::new();
    let mut timings = Vec::new();
    for (r, t) in results {
        reports.extend(r);
        timings.push(t);
    }
    Ok(SuiteRun { selection: sel.clone(), reports, timings })
}
