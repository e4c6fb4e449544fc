use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use eigenbound::geometry::mesh_io::{read_mesh, write_mesh};
use eigenbound::harness::lookup;
use eigenbound::spectral::mesh_eigenpair;
use eigenbound::Error;

use crate::config::{FileConfig, SolverFlags};
use crate::output::write_atomic;
use crate::{exit_for, EXIT_INVALID};

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Built-in scenario to mesh.
    #[arg(long, conflicts_with = "mesh")]
    scenario: Option<String>,
    /// OFF mesh file; a `.json` sidecar next to it supplies metrics and boundary.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Mesh resolution (default: the scenario's finest ladder rung).
    #[arg(long)]
    resolution: Option<usize>,
    /// Ball radius override for the scenario.
    #[arg(long)]
    r: Option<f64>,
    /// Where to write the result JSON (default: <out>/solve-<name>.json).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output directory (default: $EIGENBOUND_OUT or ./eigenbound-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the mesh as OFF plus sidecar.
    #[arg(long)]
    export_mesh: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

pub fn run(args: SolveArgs, cfg: &FileConfig) -> u8 {
    let fail = |e: Error| {
        eprintln!("error: {e}");
        exit_for(&e)
    };
    let opts = match args.solver.resolve(cfg) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let scenario = args.scenario.clone().or_else(|| if args.mesh.is_none() { cfg.scenario.clone() } else { None });
    let (name, mesh, resolution) = match (&scenario, &args.mesh) {
        (Some(name), None) => {
            let sc = match lookup(name).and_then(|sc| match args.r.or(cfg.r) {
                Some(r) => sc.with_radius(r),
                None => Ok(sc),
            }) {
                Ok(sc) => sc,
                Err(e) => return fail(e),
            };
            let res = args.resolution.or(cfg.resolution).or_else(|| sc.ladder.last().copied()).unwrap_or(100);
            match sc.mesh(res) {
                Ok(m) => (name.clone(), m, Some(res)),
                Err(e) => return fail(e),
            }
        }
        (None, Some(path)) => match read_mesh(path) {
            Ok(m) => {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "mesh".into());
                (stem, m, None)
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INVALID;
            }
        },
        _ => {
            eprintln!("error: give exactly one of --scenario or --mesh");
            return EXIT_INVALID;
        }
    };
    if let Some(p) = &args.export_mesh {
        if let Err(e) = write_mesh(&mesh, p) {
            return fail(e);
        }
    }
    let (result, code) = match mesh_eigenpair(&mesh, opts) {
        Ok(r) => (r, 0),
        Err(Error::NonConvergence { best, iterations, residual }) => {
            eprintln!("error: eigensolver did not converge after {iterations} iterations (residual {residual:e}); writing best iterate");
            (*best, crate::EXIT_NONCONVERGENCE)
        }
        Err(e) => return fail(e),
    };
    let result = match resolution {
        Some(res) => result.with_mesh(&mesh, res),
        None => {
            let mut r = result;
            r.mesh_size = Some(mesh.mesh_size());
            r
        }
    };
    let record = json!({ "source": name, "solver": opts, "result": result });
    let path = args.output.unwrap_or_else(|| cfg.out_dir(args.out).join(format!("solve-{name}.json")));
    let text = match serde_json::to_string_pretty(&record) {
        Ok(t) => t,
        Err(e) => return fail(e.into()),
    };
    if let Err(e) = write_atomic(&path, &text) {
        return fail(e);
    }
    println!("lambda1: {}", result.lambda1);
    println!("residual: {:e}", result.residual);
    println!("unknowns: {}", result.unknowns);
    println!("written: {}", path.display());
    code
}
