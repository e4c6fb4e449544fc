//! Verification reports and their JSON, CSV and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A hypothesis of the estimate does not hold; nothing was compared.
    Rejected,
    /// The estimate is vacuous (e.g. nonpositive divergence).
    Inapplicable,
    NonConvergence,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Rejected => "rejected",
            Verdict::Inapplicable => "inapplicable",
            Verdict::NonConvergence => "non-convergence",
        }
    }
}

/// One resolution of a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungReport {
    pub resolution: usize,
    pub mesh_size: f64,
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bound: f64,
    pub slack: f64,
    /// `lambda1 - bound`.
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inf_div: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBoundReport {
    pub scenario: String,
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default)]
    pub rungs: Vec<RungReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolated: Option<f64>,
    /// Finest-rung margin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub verdict: Verdict,
    /// Finest-rung measurements of the vector field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inf_div: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div_lower_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_lambda: Option<f64>,
    #[serde(default)]
    pub observations: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default)]
    pub expected_rejection: bool,
}

impl EigenBoundReport {
    pub fn new(scenario: &str, check: &str) -> Self {
        EigenBoundReport {
            scenario: scenario.to_string(),
            check: check.to_string(),
            field: None,
            radius: None,
            case_tag: None,
            bound: None,
            rungs: Vec::new(),
            extrapolated: None,
            margin: None,
            verdict: Verdict::Pass,
            inf_div: None,
            sup_norm: None,
            div_lower_bound: None,
            reference_lambda: None,
            observations: BTreeMap::new(),
            message: None,
            expected_rejection: false,
        }
    }

    /// Report for a run that stopped before comparing anything.
    pub fn from_error(scenario: &str, check: &str, err: &Error) -> Self {
        let mut r = EigenBoundReport::new(scenario, check);
        r.verdict = verdict_for_error(err);
        r.message = Some(err.to_string());
        r
    }

    pub fn finest_lambda(&self) -> Option<f64> {
        self.rungs.last().map(|r| r.lambda1)
    }

    /// Whether this report counts as passing in suite mode.
    pub fn is_ok(&self) -> bool {
        match self.verdict {
            Verdict::Pass | Verdict::Inapplicable => true,
            Verdict::Rejected => self.expected_rejection,
            Verdict::Fail | Verdict::NonConvergence => false,
        }
    }

    pub fn observe(&mut self, key: &str, value: f64) {
        self.observations.insert(key.to_string(), value);
    }

    /// Unique key for merging runs.
    pub fn key(&self) -> (String, String, Option<String>, Option<u64>) {
        (self.scenario.clone(), self.check.clone(), self.field.clone(), self.radius.map(f64::to_bits))
    }
}

/// Hypothesis failures are rejections; solver failures are non-convergence;
/// anything else is a failed verification.
pub fn verdict_for_error(err: &Error) -> Verdict {
    match err {
        Error::HypothesisViolation(_) | Error::NoAdmissibleRadius(_) | Error::InadmissibleRadius { .. } => {
            Verdict::Rejected
        }
        Error::LemmaInapplicable(_) => Verdict::Inapplicable,
        Error::NonConvergence { .. } | Error::LinearSolver(..) => Verdict::NonConvergence,
        _ => Verdict::Fail,
    }
}

/// Relative slack for rung `i` of `n`: 2% at the coarsest rung down to 0.5%
/// at the finest, linear in between.
pub fn relative_slack(i: usize, n: usize) -> f64 {
    if n <= 1 {
        return 0.005;
    }
    0.02 - 0.015 * i as f64 / (n - 1) as f64
}

/// Exit status for a set of reports: 1 on any failure, else 3 on any
/// non-convergence, else 2 on any unexpected rejection, else 0.
pub fn exit_code(reports: &[EigenBoundReport]) -> i32 {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        1
    } else if reports.iter().any(|r| r.verdict == Verdict::NonConvergence) {
        3
    } else if reports.iter().any(|r| r.verdict == Verdict::Rejected && !r.expected_rejection) {
        2
    } else {
        0
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

pub const CSV_HEADER: &str = "scenario,check,field,radius,resolution,bound,lambda1,margin,verdict";

/// One row per rung; reports without rungs get a single row with an empty
/// resolution.
pub fn to_csv(reports: &[EigenBoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let field = r.field.clone().unwrap_or_default();
        if r.rungs.is_empty() {
            let _ = writeln!(
                out,
                "{},{},{},{},,{},,,{}",
                r.scenario,
                r.check,
                field,
                opt(r.radius),
                opt(r.bound),
                r.verdict.as_str()
            );
        }
        for g in &r.rungs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.scenario,
                r.check,
                field,
                opt(r.radius),
                g.resolution,
                g.bound,
                g.lambda1,
                g.margin,
                g.verdict.as_str()
            );
        }
    }
    out
}

/// A CSV row, as read back by [`from_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scenario: String,
    pub check: String,
    pub field: String,
    pub radius: String,
    pub resolution: String,
    pub rest: String,
}

pub fn from_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse("unexpected CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let parts: Vec<&str> = l.splitn(6, ',').collect();
            if parts.len() != 6 {
                return Err(Error::Parse(format!("short CSV row `{l}`")));
            }
            Ok(CsvRow {
                scenario: parts[0].into(),
                check: parts[1].into(),
                field: parts[2].into(),
                radius: parts[3].into(),
                resolution: parts[4].into(),
                rest: parts[5].into(),
            })
        })
        .collect()
}

/// Aligned-column summary, one line per report.
pub fn to_text(reports: &[EigenBoundReport]) -> String {
    let header = ["scenario", "check", "r", "case", "bound", "lambda1", "margin", "verdict"];
    let rows: Vec<[String; 8]> = reports
        .iter()
        .map(|r| {
            let check = match &r.field {
                Some(f) => format!("{}/{}", r.check, f),
                None => r.check.clone(),
            };
            [
                r.scenario.clone(),
                check,
                r.radius.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                r.case_tag.clone().unwrap_or_else(|| "-".into()),
                r.bound.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into()),
                r.finest_lambda().map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into()),
                r.margin.map(|v| format!("{v:+.6}")).unwrap_or_else(|| "-".into()),
                r.verdict.as_str().to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &[&str], out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header, &mut out);
    for (row, r) in rows.iter().zip(reports) {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        line(&cells, &mut out);
        if let (Some(m), false) = (&r.message, r.verdict == Verdict::Pass) {
            let _ = writeln!(out, "    {m}");
        }
    }
    out
}
