use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use serde_json::json;

use eigenbound::harness::report::to_csv;
use eigenbound::harness::{EigenBoundReport, RungReport};
use eigenbound::{Error, Result};

use crate::config::FileConfig;
use crate::output::write_atomic;
use crate::EXIT_INVALID;

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Directory of `verify` outputs, or individual JSON files. Files are
    /// merged in name order; later entries win on duplicate keys.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output directory for merged.csv and series.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct RunFile {
    reports: Vec<EigenBoundReport>,
}

fn collect_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .filter(|f| !f.to_string_lossy().ends_with(".timings.json"))
                .collect();
            found.sort();
            files.extend(found);
        } else if p.is_file() {
            files.push(p.clone());
        } else {
            return Err(Error::Io(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(files)
}

fn read_run(path: &Path) -> Option<Vec<EigenBoundReport>> {
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str::<RunFile>(&text).ok().map(|r| r.reports)
}

type RowKey = (String, String, Option<String>, Option<u64>, usize);

/// Merges reports rung by rung; a later duplicate of
/// (scenario, check, field, radius, resolution) replaces the earlier one.
fn merge(runs: Vec<Vec<EigenBoundReport>>, warnings: &mut Vec<String>) -> Vec<EigenBoundReport> {
    let mut heads: BTreeMap<(String, String, Option<String>, Option<u64>), EigenBoundReport> = BTreeMap::new();
    let mut rows: BTreeMap<RowKey, RungReport> = BTreeMap::new();
    for reports in runs {
        for r in reports {
            let (s, c, f, rad) = r.key();
            for g in &r.rungs {
                let key = (s.clone(), c.clone(), f.clone(), rad, g.resolution);
                if rows.insert(key, g.clone()).is_some() {
                    warnings.push(format!(
                        "warning: duplicate {s}/{c}{} r={} resolution {}; keeping the later value",
                        f.as_deref().map(|f| format!("/{f}")).unwrap_or_default(),
                        r.radius.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                        g.resolution
                    ));
                }
            }
            let mut head = r.clone();
            head.rungs.clear();
            heads.insert((s, c, f, rad), head);
        }
    }
    heads
        .into_iter()
        .map(|(k, mut head)| {
            head.rungs = rows
                .range((k.0.clone(), k.1.clone(), k.2.clone(), k.3, 0)..=(k.0, k.1, k.2, k.3, usize::MAX))
                .map(|(_, g)| g.clone())
                .collect();
            head
        })
        .collect()
}

fn series(reports: &[EigenBoundReport]) -> serde_json::Value {
    let mut vs_r: BTreeMap<String, Vec<serde_json::Value>> = BTreeMap::new();
    let mut vs_res = Vec::new();
    for r in reports {
        let label = match &r.field {
            Some(f) => format!("{}/{}/{}", r.scenario, r.check, f),
            None => format!("{}/{}", r.scenario, r.check),
        };
        if let (Some(rad), Some(l)) = (r.radius, r.finest_lambda()) {
            vs_r.entry(label.clone()).or_default().push(json!({ "r": rad, "lambda1": l, "bound": r.bound }));
        }
        if !r.rungs.is_empty() {
            vs_res.push(json!({
                "series": label,
                "r": r.radius,
                "resolution": r.rungs.iter().map(|g| g.resolution).collect::<Vec<_>>(),
                "mesh_size": r.rungs.iter().map(|g| g.mesh_size).collect::<Vec<_>>(),
                "lambda1": r.rungs.iter().map(|g| g.lambda1).collect::<Vec<_>>(),
                "bound": r.rungs.iter().map(|g| g.bound).collect::<Vec<_>>(),
            }));
        }
    }
    for v in vs_r.values_mut() {
        v.sort_by(|a, b| a["r"].as_f64().partial_cmp(&b["r"].as_f64()).unwrap_or(std::cmp::Ordering::Equal));
    }
    json!({ "lambda_vs_r": vs_r, "lambda_vs_resolution": vs_res })
}

pub fn run(args: ReportArgs, cfg: &FileConfig) -> u8 {
    let files = match collect_files(&args.inputs) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    let runs: Vec<Vec<EigenBoundReport>> = files.iter().filter_map(|f| read_run(f)).collect();
    if runs.is_empty() {
        eprintln!("error: no verification outputs found in the inputs");
        return EXIT_INVALID;
    }
    let mut warnings = Vec::new();
    let merged = merge(runs, &mut warnings);
    for w in &warnings {
        eprintln!("{w}");
    }
    let dir = cfg.out_dir(args.out);
    let csv = to_csv(&merged);
    let written = write_atomic(&dir.join("merged.csv"), &csv).and_then(|_| {
        let s = serde_json::to_string_pretty(&series(&merged)).map_err(Error::from)?;
        write_atomic(&dir.join("series.json"), &s)
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    println!("merged {} files, {} reports", files.len(), merged.len());
    println!("written: {}", dir.join("merged.csv").display());
    println!("written: {}", dir.join("series.json").display());
    0
}
