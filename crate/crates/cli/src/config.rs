//! Defaults read from `--config`. Command-line flags win over the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use eigenbound::spectral::EigenOptions;
use eigenbound::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "EIGENBOUND_OUT";
pub const DEFAULT_OUT: &str = "eigenbound-out";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub suite: Option<String>,
    pub scenario: Option<String>,
    pub r: Option<f64>,
    pub ladder: Option<Vec<usize>>,
    pub resolution: Option<usize>,
    pub solver: Option<SolverConfig>,
    /// Default flag values for `bound`.
    pub bound: Option<BoundDefaults>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub inner_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundDefaults {
    pub m: Option<usize>,
    pub a: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub kappa: Option<f64>,
    pub h: Option<f64>,
    pub r: Option<f64>,
    pub inj: Option<f64>,
    pub ambient_dim: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
            }
        }
    }

    /// Flag, then config file, then `EIGENBOUND_OUT`, then `./eigenbound-out`.
    pub fn out_dir(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| self.out.clone())
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

/// Solver flags shared by `solve` and `verify`.
#[derive(clap::Args, Debug, Clone, Default)]
pub struct SolverFlags {
    /// Eigen-residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative eigenvalue-change tolerance.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Tolerance of the inner linear solves.
    #[arg(long)]
    pub inner_tol: Option<f64>,
}

impl SolverFlags {
    pub fn resolve(&self, cfg: &FileConfig) -> Result<EigenOptions> {
        let file = cfg.solver.clone().unwrap_or_default();
        let d = EigenOptions::default();
        let opts = EigenOptions {
            tol: self.tol.or(file.tol).unwrap_or(d.tol),
            rel_tol: self.rel_tol.or(file.rel_tol).unwrap_or(d.rel_tol),
            max_iter: self.max_iter.or(file.max_iter).unwrap_or(d.max_iter),
            inner_tol: self.inner_tol.or(file.inner_tol).unwrap_or(d.inner_tol),
        };
        for (name, v) in [("tol", opts.tol), ("rel-tol", opts.rel_tol), ("inner-tol", opts.inner_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidArgument(format!("--{name} must lie in (0, 1), got {v}")));
            }
        }
        if opts.max_iter == 0 {
            return Err(Error::InvalidArgument("--max-iter must be >= 1".into()));
        }
        Ok(opts)
    }
}
