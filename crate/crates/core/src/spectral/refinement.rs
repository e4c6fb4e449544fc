use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RiemannianMesh;
use crate::spectral::{mesh_eigenpair, EigenOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub resolution: usize,
    pub mesh_size: f64,
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub rungs: Vec<Rung>,
    /// Richardson limit from the last two rungs.
    pub extrapolated: f64,
    /// `|finest - extrapolated|`.
    pub error_estimate: f64,
    /// Observed order from the last three rungs, when available.
    pub order: Option<f64>,
}

impl RefinementStudy {
    pub fn finest(&self) -> &Rung {
        self.rungs.last().expect("a study has at least one rung")
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.rungs.windows(2).all(|w| w[1].lambda1 <= w[0].lambda1)
    }

    /// Extrapolates from rungs solved elsewhere (coarsest first, at least one).
    pub fn from_rungs(rungs: Vec<Rung>) -> Self {
        let k = rungs.len();
        let order = if k >= 3 {
            let (a, b, c) = (rungs[k - 3].lambda1, rungs[k - 2].lambda1, rungs[k - 1].lambda1);
            let ratio = (a - b) / (b - c);
            let ref_ratio = rungs[k - 2].resolution as f64 / rungs[k - 3].resolution as f64;
            if ratio > 1.0 && ratio.is_finite() {
                Some(ratio.ln() / ref_ratio.ln())
            } else {
                None
            }
        } else {
            None
        };
        let (extrapolated, error_estimate) = if k >= 2 {
            let (coarse, fine) = (rungs[k - 2].lambda1, rungs[k - 1].lambda1);
            let t = rungs[k - 1].resolution as f64 / rungs[k - 2].resolution as f64;
            let p = order.filter(|p| (0.5..=4.0).contains(p)).unwrap_or(2.0);
            let lim = fine - (coarse - fine) / (t.powf(p) - 1.0);
            (lim, (fine - lim).abs())
        } else {
            (rungs[0].lambda1, f64::NAN)
        };
        RefinementStudy { rungs, extrapolated, error_estimate, order }
    }
}

/// Solves on each resolution of `resolutions` (increasing, normally doubling)
/// and extrapolates. The assumed order is 2 unless three rungs give a usable
/// observed order.
pub fn refinement_study<F>(family: F, resolutions: &[usize], opts: EigenOptions) -> Result<RefinementStudy>
where
    F: Fn(usize) -> Result<RiemannianMesh>,
{
    if resolutions.is_empty() {
        return Err(Error::InvalidArgument("refinement study needs at least one resolution".into()));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("resolutions must be strictly increasing".into()));
    }
    let mut rungs = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        let mesh = family(res)?;
        let r = mesh_eigenpair(&mesh, opts)?;
        rungs.push(Rung {
            resolution: res,
            mesh_size: mesh.mesh_size(),
            lambda1: r.lambda1,
            residual: r.residual,
            iterations: r.iterations,
        });
    }
    Ok(RefinementStudy::from_rungs(rungs))
}

/// `base, 2 base, 4 base, ...` with `levels` entries.
pub fn doubling_ladder(base: usize, levels: usize) -> Vec<usize> {
    (0..levels).map(|i| base << i).collect()
}
