//! The scenario library.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::BallContext;
use crate::error::{Error, Result};
use crate::geometry::{
    geodesic_ball_mesh, immersed_patch_mesh, interval_mesh, mean_curvature_norm, radial_unit_field,
    analytic_distance_gradient, square_mesh, Cylinder, Equidistant, ParametricImmersion, Plane,
    RiemannianMesh, RoundSphere, SpaceForm, VectorField,
};
use crate::harness::oracles;

/// What gets meshed.
#[derive(Debug, Clone)]
pub enum Geometry {
    /// `[0, length]`.
    Interval { length: f64 },
    /// `[0, side]^2`.
    Square { side: f64 },
    /// Geodesic disk of radius `radius` in a 2D space form, viewed as a
    /// totally geodesic slice of the 3D space form of the same curvature.
    Disk { form: SpaceForm, radius: f64 },
    /// Component of `phi^{-1}(B_N(p, radius))`.
    Patch { immersion: Arc<dyn ParametricImmersion>, p: Vec<f64>, radius: f64 },
}

/// Which verifications a scenario takes part in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Calibration,
    Exhaustion,
    MainLemma,
    Ball,
    Hadamard,
    Hessian,
    Nogo,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Calibration => "calibration",
            CheckKind::Exhaustion => "exhaustion",
            CheckKind::MainLemma => "main-lemma",
            CheckKind::Ball => "ball",
            CheckKind::Hadamard => "hadamard",
            CheckKind::Hessian => "hessian",
            CheckKind::Nogo => "nogo",
        }
    }
}

/// Data for the Hadamard-submanifold check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HadamardData {
    /// Ambient curvature is at most `-a^2`.
    pub a: f64,
    /// Declared bound `|H| <= beta`.
    pub beta: f64,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub geometry: Geometry,
    /// Resolutions, coarsest first.
    pub ladder: Vec<usize>,
    /// Submanifold dimension.
    pub m: usize,
    /// Constant sectional curvature of the ambient space.
    pub ambient_curvature: f64,
    pub ambient_dim: usize,
    /// Injectivity radius of the ambient space at `p`.
    pub inj: f64,
    /// Declared `sup |H|` (exact, not measured).
    pub mean_curvature: f64,
    /// Continuous `lambda_1`, when an independent oracle exists.
    pub reference_lambda: Option<f64>,
    pub hadamard: Option<HadamardData>,
    pub checks: Vec<CheckKind>,
    /// Checks whose hypotheses are meant to fail for this scenario.
    pub expected_rejections: Vec<CheckKind>,
}

impl Scenario {
    pub fn radius(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::Disk { radius, .. } | Geometry::Patch { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Same scenario at another ball radius. The reference eigenvalue is
    /// recomputed for disks and dropped for patches.
    pub fn with_radius(&self, r: f64) -> Result<Scenario> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        let mut sc = self.clone();
        match &mut sc.geometry {
            Geometry::Disk { form, radius } => {
                *radius = r;
                sc.reference_lambda = Some(oracles::radial_disk_eigenvalue(form.curvature, r)?);
            }
            Geometry::Patch { radius, .. } => {
                *radius = r;
                sc.reference_lambda = None;
            }
            _ => {
                return Err(Error::InvalidArgument(format!("scenario `{}` has no ball radius", sc.name)));
            }
        }
        Ok(sc)
    }

    pub fn mesh(&self, resolution: usize) -> Result<RiemannianMesh> {
        match &self.geometry {
            Geometry::Interval { length } => interval_mesh(*length, resolution),
            Geometry::Square { side } => square_mesh(*side, resolution),
            Geometry::Disk { form, radius } => geodesic_ball_mesh(form, *radius, resolution),
            Geometry::Patch { immersion, p, radius } => immersed_patch_mesh(immersion.as_ref(), p, *radius, resolution),
        }
    }

    /// `X = grad(rho o phi)` (or `grad rho` for intrinsic disks) at element barycenters.
    pub fn distance_gradient_field(&self, mesh: &RiemannianMesh) -> Result<VectorField> {
        match &self.geometry {
            Geometry::Disk { .. } => radial_unit_field(mesh),
            Geometry::Patch { immersion, p, .. } => analytic_distance_gradient(immersion.as_ref(), p, mesh),
            _ => Err(Error::InvalidArgument(format!("scenario `{}` has no distance field", self.name))),
        }
    }

    /// `kappa` and `h` are constant for every library scenario.
    pub fn ball_context(&self) -> Result<BallContext> {
        BallContext::constant(self.m, self.ambient_dim, self.inj, self.ambient_curvature, self.mean_curvature)
    }

    /// Checks the declared `|H|` against samples and that `p` is off the image.
    pub fn validate(&self) -> Result<()> {
        if let Geometry::Patch { immersion, p, .. } = &self.geometry {
            let n = immersion.ambient();
            n.check_point(p)?;
            let chart = immersion.chart();
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let len = n.model_len();
            for _ in 0..200 {
                let x = [rng.gen_range(chart.u.0..chart.u.1), rng.gen_range(chart.v.0..chart.v.1)];
                let h = mean_curvature_norm(immersion.as_ref(), x)?;
                if (h - self.mean_curvature).abs() > 1e-8 {
                    return Err(Error::HypothesisViolation(format!(
                        "declared |H| = {} but sampled |H| = {h} at {x:?}",
                        self.mean_curvature
                    )));
                }
            }
            const GRID: usize = 100;
            let mut closest = f64::INFINITY;
            for i in 0..=GRID {
                for j in 0..=GRID {
                    let t = [i as f64 / GRID as f64, j as f64 / GRID as f64];
                    let x = [chart.u.0 + t[0] * (chart.u.1 - chart.u.0), chart.v.0 + t[1] * (chart.v.1 - chart.v.0)];
                    let y = immersion.point(x)?;
                    closest = closest.min(n.distance_unchecked(p, &y[..len]));
                }
            }
            if !(closest > 0.0) {
                return Err(Error::HypothesisViolation("the ball center lies on the immersed surface".into()));
            }
        }
        Ok(())
    }
}

const DISK_LADDER: [usize; 3] = [50, 100, 200];
const PATCH_LADDER: [usize; 3] = [50, 100, 200];

fn disk(name: &str, description: &str, curvature: f64, radius: f64, checks: Vec<CheckKind>) -> Result<Scenario> {
    let form = SpaceForm::new(2, curvature)?;
    Ok(Scenario {
        name: name.into(),
        description: description.into(),
        geometry: Geometry::Disk { form, radius },
        ladder: DISK_LADDER.to_vec(),
        m: 2,
        ambient_curvature: curvature,
        ambient_dim: 3,
        inj: SpaceForm::new(3, curvature)?.injectivity_radius(),
        mean_curvature: 0.0,
        reference_lambda: Some(oracles::radial_disk_eigenvalue(curvature, radius)?),
        hadamard: None,
        checks,
        expected_rejections: Vec::new(),
    })
}

fn patch(
    name: &str,
    description: &str,
    immersion: Arc<dyn ParametricImmersion>,
    p: Vec<f64>,
    radius: f64,
    checks: Vec<CheckKind>,
) -> Scenario {
    let ambient = immersion.ambient();
    Scenario {
        name: name.into(),
        description: description.into(),
        mean_curvature: immersion.analytic_mean_curvature().unwrap_or(f64::NAN),
        ambient_curvature: ambient.curvature,
        ambient_dim: ambient.dim,
        inj: ambient.injectivity_radius(),
        geometry: Geometry::Patch { immersion, p, radius },
        ladder: PATCH_LADDER.to_vec(),
        m: 2,
        reference_lambda: None,
        hadamard: None,
        checks,
        expected_rejections: Vec::new(),
    }
}

fn equidistant(name: &str, t: f64, radius: f64, checks: Vec<CheckKind>) -> Scenario {
    let imm = Arc::new(Equidistant { t, half_width: 6.5 });
    let mut sc = patch(
        name,
        &format!("equidistant surface at distance {t} from a totally geodesic plane in H^3, ball centered on the plane"),
        imm,
        vec![1.0, 0.0, 0.0, 0.0],
        radius,
        checks,
    );
    // cosh(rho) = cosh(t) cosh(s): the patch is a hyperbolic disk scaled by cosh t.
    let s = (radius.cosh() / t.cosh()).acosh();
    sc.reference_lambda = oracles::radial_disk_eigenvalue(-1.0, s).ok().map(|l| l / t.cosh().powi(2));
    sc.hadamard = Some(HadamardData { a: 1.0, beta: 2.0 * t.tanh(), radii: vec![2.0, 4.0, 6.0] });
    sc
}

/// Every named scenario, in a fixed order.
pub fn library() -> Result<Vec<Scenario>> {
    static LIBRARY: OnceLock<Result<Vec<Scenario>>> = OnceLock::new();
    LIBRARY.get_or_init(build_library).clone()
}

fn build_library() -> Result<Vec<Scenario>> {
    use CheckKind::*;
    let mut out = vec![
        Scenario {
            name: "interval".into(),
            description: "unit interval".into(),
            geometry: Geometry::Interval { length: 1.0 },
            ladder: vec![250, 500, 1000],
            m: 1,
            ambient_curvature: 0.0,
            ambient_dim: 1,
            inj: f64::INFINITY,
            mean_curvature: 0.0,
            reference_lambda: Some(PI * PI),
            hadamard: None,
            checks: vec![Calibration],
            expected_rejections: Vec::new(),
        },
        Scenario {
            name: "euclidean-square".into(),
            description: "unit square".into(),
            geometry: Geometry::Square { side: 1.0 },
            ladder: vec![25, 50, 100],
            m: 2,
            ambient_curvature: 0.0,
            ambient_dim: 2,
            inj: f64::INFINITY,
            mean_curvature: 0.0,
            reference_lambda: Some(2.0 * PI * PI),
            hadamard: None,
            checks: vec![Calibration],
            expected_rejections: Vec::new(),
        },
    ];
    let mut unit_disk = disk("euclidean-disk", "Euclidean unit disk", 0.0, 1.0, vec![Calibration, MainLemma, Ball])?;
    unit_disk.reference_lambda = Some(oracles::unit_disk_eigenvalue());
    out.push(unit_disk);
    out.push(disk("spherical-cap", "geodesic cap of radius pi/4 on the unit sphere", 1.0, FRAC_PI_4, vec![MainLemma, Ball])?);
    for r in [2.0, 4.0, 6.0] {
        let name = format!("hyperbolic-disk-r{r}");
        let checks = if r == 2.0 { vec![Exhaustion, MainLemma, Ball] } else { vec![Exhaustion] };
        out.push(disk(&name, &format!("geodesic disk of radius {r} in H^2"), -1.0, r, checks)?);
    }
    let mut plane = patch(
        "flat-plane",
        "plane z = 0 in R^3, ball of radius 2 centered at (0, 0, 1)",
        Arc::new(Plane { half_width: 3.0 }),
        vec![0.0, 0.0, 1.0],
        2.0,
        vec![MainLemma, Ball],
    );
    plane.reference_lambda = Some(oracles::unit_disk_eigenvalue() / 3.0);
    out.push(plane);
    out.push(patch(
        "cylinder",
        "unit cylinder in R^3, ball of radius 0.5 centered 0.9 from the axis",
        Arc::new(Cylinder { radius: 1.0, half_length: 2.0 }),
        vec![0.9, 0.0, 0.0],
        0.5,
        vec![MainLemma, Ball],
    ));
    out.push(patch(
        "round-sphere",
        "unit sphere in R^3, ball of radius 0.45 centered 1.3 from the origin",
        Arc::new(RoundSphere { radius: 1.0, half_width: 1.5 }),
        vec![0.0, 0.0, 1.3],
        0.45,
        vec![MainLemma, Ball],
    ));
    let d: f64 = 0.5;
    let mut tg = patch(
        "totally-geodesic",
        "totally geodesic H^2 in H^3, ball of radius 4 centered 0.5 off the plane",
        Arc::new(Equidistant::totally_geodesic(4.5)),
        vec![d.cosh(), 0.0, 0.0, d.sinh()],
        4.0,
        vec![MainLemma, Ball],
    );
    tg.reference_lambda = Some(oracles::radial_disk_eigenvalue(-1.0, (4f64.cosh() / d.cosh()).acosh())?);
    out.push(tg);
    let d: f64 = 0.1;
    let mut sharp = patch(
        "totally-geodesic-sharp",
        "totally geodesic H^2 in H^3, balls centered 0.1 off the plane",
        Arc::new(Equidistant::totally_geodesic(6.5)),
        vec![d.cosh(), 0.0, 0.0, d.sinh()],
        6.0,
        vec![Hadamard],
    );
    sharp.hadamard = Some(HadamardData { a: 1.0, beta: 0.0, radii: vec![2.0, 4.0, 6.0] });
    out.push(sharp);
    out.push(equidistant("equidistant-t0.2", 0.2, 4.0, vec![MainLemma, Ball, Hadamard]));
    out.push(equidistant("equidistant-t0.4", 0.4, 4.0, vec![MainLemma, Ball, Hadamard]));
    let mut boundary = equidistant("equidistant-t0.5h", 0.5f64.atanh(), 4.0, vec![Ball, Hadamard]);
    // 2 tanh(atanh 0.5) rounds below 1; declare the boundary value exactly.
    boundary.mean_curvature = 1.0;
    if let Some(h) = boundary.hadamard.as_mut() {
        h.beta = 1.0;
    }
    boundary.expected_rejections = vec![Hadamard];
    out.push(boundary);
    let mut steep = equidistant("equidistant-t0.6", 0.6, 1.2, vec![Ball]);
    steep.hadamard = None;
    out.push(steep);
    Ok(out)
}

pub fn lookup(name: &str) -> Result<Scenario> {
    library()?
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

pub fn scenario_names() -> Result<Vec<String>> {
    Ok(library()?.into_iter().map(|s| s.name).collect())
}
