//! Verification pipelines. Each one confronts a closed-form bound with a
//! discrete `lambda_1` computed on a ladder of meshes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    ball_eigenvalue_bound, div_lower_bound, hadamard_bound, laplacian_comparison_range,
    main_lemma_bound, mckean_bound, mu0, mu1, CurvatureBound,
};
use crate::error::{Error, Result};
use crate::geometry::{
    constant_field, geodesic_ball_mesh, position_field, radial_unit_field, traced_hessian_laplacian,
    weak_divergence, RiemannianMesh, SpaceForm, VectorField,
};
use crate::harness::report::{relative_slack, verdict_for_error, EigenBoundReport, RungReport, Verdict};
use crate::harness::scenario::{Geometry, Scenario};
use crate::spectral::{mesh_eigenpair, EigenOptions, EigenResult, RefinementStudy, Rung};

/// Vector fields the Main Lemma and the no-go scan are tried with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// `grad(rho o phi)`, or `grad rho` on an intrinsic disk.
    DistanceGradient,
    Position,
    RadialUnit,
    Constant,
}

impl FieldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::DistanceGradient => "distance-gradient",
            FieldKind::Position => "position",
            FieldKind::RadialUnit => "radial-unit",
            FieldKind::Constant => "constant",
        }
    }

    pub fn build(&self, sc: &Scenario, mesh: &RiemannianMesh) -> Result<VectorField> {
        match self {
            FieldKind::DistanceGradient => sc.distance_gradient_field(mesh),
            FieldKind::Position => Ok(position_field(mesh)),
            FieldKind::RadialUnit => radial_unit_field(mesh),
            FieldKind::Constant => Ok(constant_field(mesh, [1.0, 0.0])),
        }
    }
}

/// Minimum weak divergence over interior vertices and maximum element norm.
pub fn field_extremes(mesh: &RiemannianMesh, x: &VectorField) -> Result<(f64, f64)> {
    let div = weak_divergence(mesh, x)?;
    let interior = mesh.interior_vertices();
    if interior.is_empty() {
        return Err(Error::NoInteriorUnknowns);
    }
    Ok((div.min_over(&interior), x.max_norm(mesh)?))
}

fn rung(res: usize, mesh_size: f64, eig: &EigenResult, bound: f64, slack: f64) -> RungReport {
    let margin = eig.lambda1 - bound;
    RungReport {
        resolution: res,
        mesh_size,
        lambda1: eig.lambda1,
        residual: eig.residual,
        iterations: eig.iterations,
        bound,
        slack,
        margin,
        verdict: if margin >= -slack { Verdict::Pass } else { Verdict::Fail },
        inf_div: None,
        sup_norm: None,
    }
}

/// Sets rungs, extrapolation and finest margin; fails the report if any rung fails.
fn finish(rep: &mut EigenBoundReport, rungs: Vec<RungReport>) {
    if rungs.is_empty() {
        return;
    }
    let study = RefinementStudy::from_rungs(
        rungs
            .iter()
            .map(|g| Rung {
                resolution: g.resolution,
                mesh_size: g.mesh_size,
                lambda1: g.lambda1,
                residual: g.residual,
                iterations: g.iterations,
            })
            .collect(),
    );
    rep.extrapolated = Some(study.extrapolated).filter(|x| x.is_finite());
    if let Some(order) = study.order {
        rep.observe("observed_order", order);
    }
    let last = rungs.last().expect("nonempty");
    rep.margin = Some(last.margin);
    rep.inf_div = last.inf_div;
    rep.sup_norm = last.sup_norm;
    if let Some(bad) = rungs.iter().find(|g| g.verdict == Verdict::Fail) {
        rep.verdict = Verdict::Fail;
        rep.message.get_or_insert_with(|| {
            format!(
                "lambda1 = {} < bound {} - slack {} at resolution {}",
                bad.lambda1, bad.bound, bad.slack, bad.resolution
            )
        });
    }
    rep.rungs = rungs;
}

fn run<F>(mut rep: EigenBoundReport, body: F) -> EigenBoundReport
where
    F: FnOnce(&mut EigenBoundReport) -> Result<()>,
{
    if let Err(e) = body(&mut rep) {
        rep.verdict = verdict_for_error(&e);
        rep.message = Some(e.to_string());
    }
    rep
}

/// Main Lemma on one mesh: `d = min interior weak div X`, `s = max |X|`,
/// `bound = (d / 2s)^2`, compared against the discrete `lambda_1` with a
/// relative slack. Returns [`Error::LemmaInapplicable`] when `d <= 0`.
pub fn verify_main_lemma(
    mesh: &RiemannianMesh,
    resolution: usize,
    x: &VectorField,
    rel_slack: f64,
    opts: EigenOptions,
) -> Result<RungReport> {
    let (d, s) = field_extremes(mesh, x)?;
    if !(d > 0.0) {
        return Err(Error::LemmaInapplicable(format!("min interior divergence is {d}")));
    }
    let bound = main_lemma_bound(d, s)?.value;
    let eig = mesh_eigenpair(mesh, opts)?;
    let mut g = rung(resolution, mesh.mesh_size(), &eig, bound, rel_slack * bound);
    g.inf_div = Some(d);
    g.sup_norm = Some(s);
    Ok(g)
}

/// Main Lemma over the scenario's ladder with the given field.
pub fn main_lemma_report(sc: &Scenario, field: FieldKind, ladder: &[usize], opts: EigenOptions) -> EigenBoundReport {
    let mut rep = EigenBoundReport::new(&sc.name, "main-lemma");
    rep.field = Some(field.as_str().into());
    rep.radius = sc.radius();
    rep.case_tag = Some("MainLemma".into());
    run(rep, |rep| {
        let mut rungs = Vec::new();
        for (i, &res) in ladder.iter().enumerate() {
            let mesh = sc.mesh(res)?;
            let x = field.build(sc, &mesh)?;
            rungs.push(verify_main_lemma(&mesh, res, &x, relative_slack(i, ladder.len()), opts)?);
        }
        rep.bound = rungs.last().map(|g| g.bound);
        finish(rep, rungs);
        Ok(())
    })
}

/// Minimum of the exact `Delta(rho o phi)` over the scenario's ball; the
/// value the measured interior divergence converges to.
fn divergence_reference(sc: &Scenario, finest: usize) -> Result<f64> {
    match &sc.geometry {
        Geometry::Disk { form, radius } => Ok((sc.m - 1) as f64 * form.distance_hessian_factor(*radius)),
        Geometry::Patch { immersion, p, .. } => {
            let mesh = sc.mesh(2 * finest)?;
            mesh.vertices()
                .iter()
                .map(|&v| traced_hessian_laplacian(immersion.as_ref(), p, v))
                .try_fold(f64::INFINITY, |acc, x| x.map(|x| acc.min(x)))
        }
        _ => Err(Error::InvalidArgument(format!("scenario `{}` has no ball", sc.name))),
    }
}

/// Full ball-theorem pipeline at the scenario's radius: admissibility, the
/// bullet bound, discrete `lambda_1` on the ladder, and the proof's
/// divergence floor and `|X| <= 1` checked on every rung to first order in
/// the mesh size.
pub fn verify_ball_theorem(sc: &Scenario, opts: EigenOptions) -> EigenBoundReport {
    let mut rep = EigenBoundReport::new(&sc.name, "ball");
    rep.radius = sc.radius();
    rep.reference_lambda = sc.reference_lambda;
    run(rep, |rep| {
        sc.validate()?;
        let r = sc.radius().ok_or_else(|| Error::InvalidArgument(format!("scenario `{}` has no ball", sc.name)))?;
        let ctx = sc.ball_context()?;
        let bound = ball_eigenvalue_bound(&ctx, r)?;
        rep.case_tag = Some(bound.case_tag.as_str().into());
        rep.bound = Some(bound.value);
        let regime = CurvatureBound::from_sectional(sc.ambient_curvature)?;
        let floor = div_lower_bound(sc.m, regime, r, sc.mean_curvature)?;
        rep.div_lower_bound = Some(floor);
        let finest = *sc.ladder.last().ok_or_else(|| Error::InvalidArgument("empty ladder".into()))?;
        let reference = divergence_reference(sc, finest)?;
        rep.observe("div_reference", reference);

        let mut rungs = Vec::new();
        let mut errors = Vec::new();
        let mut problems = Vec::new();
        for (i, &res) in sc.ladder.iter().enumerate() {
            let mesh = sc.mesh(res)?;
            let eig = mesh_eigenpair(&mesh, opts)?;
            let x = sc.distance_gradient_field(&mesh)?;
            let (d, s) = field_extremes(&mesh, &x)?;
            let h = mesh.mesh_size();
            let mut g = rung(res, h, &eig, bound.value, relative_slack(i, sc.ladder.len()) * bound.value);
            g.inf_div = Some(d);
            g.sup_norm = Some(s);
            if d < floor - h {
                problems.push(format!("min div {d} below floor {floor} - h {h} at resolution {res}"));
            }
            if s > 1.0 + h {
                problems.push(format!("max |X| = {s} exceeds 1 + h at resolution {res}"));
            }
            let err = (d - reference).abs();
            rep.observe(&format!("div_error_{res}"), err);
            errors.push(err);
            rungs.push(g);
        }
        for (i, w) in errors.windows(2).enumerate() {
            if w[1] > 0.0 {
                rep.observe(&format!("div_error_ratio_{}", i + 1), w[0] / w[1]);
            }
        }
        finish(rep, rungs);
        if !problems.is_empty() {
            rep.verdict = Verdict::Fail;
            rep.message = Some(problems.join("; "));
        }
        Ok(())
    })
}

/// McKean-type exhaustion check on a hyperbolic disk: `lambda_1 >= (m-1)^2 a^2 / 4`.
pub fn verify_exhaustion(sc: &Scenario, opts: EigenOptions) -> EigenBoundReport {
    let mut rep = EigenBoundReport::new(&sc.name, "exhaustion");
    rep.radius = sc.radius();
    rep.reference_lambda = sc.reference_lambda;
    run(rep, |rep| {
        if !(sc.ambient_curvature < 0.0) {
            return Err(Error::HypothesisViolation("exhaustion needs negative curvature".into()));
        }
        let bound = mckean_bound(sc.m, (-sc.ambient_curvature).sqrt())?;
        rep.case_tag = Some(bound.case_tag.as_str().into());
        rep.bound = Some(bound.value);
        let mut rungs = Vec::new();
        for (i, &res) in sc.ladder.iter().enumerate() {
            let mesh = sc.mesh(res)?;
            let eig = mesh_eigenpair(&mesh, opts)?;
            rungs.push(rung(res, mesh.mesh_size(), &eig, bound.value, relative_slack(i, sc.ladder.len()) * bound.value));
        }
        finish(rep, rungs);
        Ok(())
    })
}

/// Calibration against an analytic eigenvalue: every rung must overestimate
/// the oracle (to 1e-12), the ladder must be nonincreasing, and the finest
/// rung must be within 0.5% (interval) or 1% (otherwise).
pub fn verify_calibration(sc: &Scenario, opts: EigenOptions) -> EigenBoundReport {
    let mut rep = EigenBoundReport::new(&sc.name, "calibration");
    rep.radius = sc.radius();
    rep.reference_lambda = sc.reference_lambda;
    run(rep, |rep| {
        let oracle = sc
            .reference_lambda
            .ok_or_else(|| Error::InvalidArgument(format!("scenario `{}` has no reference eigenvalue", sc.name)))?;
        rep.bound = Some(oracle);
        let tol = if matches!(sc.geometry, Geometry::Interval { .. }) { 0.005 } else { 0.01 };
        let mut rungs = Vec::new();
        for &res in &sc.ladder {
            let mesh = sc.mesh(res)?;
            let eig = mesh_eigenpair(&mesh, opts)?;
            rungs.push(rung(res, mesh.mesh_size(), &eig, oracle, 1e-12));
        }
        let nonincreasing = rungs.windows(2).all(|w| w[1].lambda1 <= w[0].lambda1);
        let rel = rungs.last().map(|g| (g.lambda1 - oracle).abs() / oracle).unwrap_or(f64::INFINITY);
        rep.observe("relative_error", rel);
        rep.observe("tolerance", tol);
        rep.observe("nonincreasing", if nonincreasing { 1.0 } else { 0.0 });
        finish(rep, rungs);
        if rep.verdict == Verdict::Pass && !(rel <= tol) {
            rep.verdict = Verdict::Fail;
            rep.message = Some(format!("relative error {rel} exceeds {tol}"));
        }
        if rep.verdict == Verdict::Pass && !nonincreasing {
            rep.verdict = Verdict::Fail;
            rep.message = Some("refinement sequence increases".into());
        }
        Ok(())
    })
}

/// Hadamard-submanifold corollary at each radius, plus the exhaustion trend
/// of `lambda_1` in `r`.
pub fn verify_hadamard_corollary(sc: &Scenario, radii: &[f64], opts: EigenOptions) -> Vec<EigenBoundReport> {
    let reject = |e: Error| vec![EigenBoundReport::from_error(&sc.name, "hadamard", &e)];
    let Some(data) = sc.hadamard.clone() else {
        return reject(Error::InvalidArgument(format!("scenario `{}` has no Hadamard data", sc.name)));
    };
    if !(sc.ambient_curvature <= -data.a * data.a) {
        return reject(Error::HypothesisViolation(format!(
            "ambient curvature {} is not <= -a^2 = {}",
            sc.ambient_curvature,
            -data.a * data.a
        )));
    }
    if sc.mean_curvature > data.beta {
        return reject(Error::HypothesisViolation(format!(
            "declared |H| = {} exceeds beta = {}",
            sc.mean_curvature, data.beta
        )));
    }
    let bound = match hadamard_bound(sc.m, data.a, data.beta) {
        Ok(b) => b,
        Err(e) => return reject(e),
    };
    let mut reports: Vec<EigenBoundReport> = radii
        .iter()
        .map(|&r| {
            let mut rep = EigenBoundReport::new(&sc.name, "hadamard");
            rep.radius = Some(r);
            rep.case_tag = Some(bound.case_tag.as_str().into());
            rep.bound = Some(bound.value);
            run(rep, |rep| {
                let s = sc.with_radius(r)?;
                s.validate()?;
                rep.reference_lambda = s.reference_lambda;
                if let Ok(ball) = s.ball_context().and_then(|ctx| ball_eigenvalue_bound(&ctx, r)) {
                    rep.observe("ball_bound", ball.value);
                }
                let mut rungs = Vec::new();
                for (i, &res) in s.ladder.iter().enumerate() {
                    let mesh = s.mesh(res)?;
                    let eig = mesh_eigenpair(&mesh, opts)?;
                    rungs.push(rung(res, mesh.mesh_size(), &eig, bound.value, relative_slack(i, s.ladder.len()) * bound.value));
                }
                finish(rep, rungs);
                Ok(())
            })
        })
        .collect();
    let finest: Vec<Option<f64>> = reports.iter().map(|r| r.finest_lambda()).collect();
    if finest.iter().all(Option::is_some) {
        let values: Vec<f64> = finest.into_iter().flatten().collect();
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        for rep in &mut reports {
            rep.observe("trend_decreasing", if decreasing { 1.0 } else { 0.0 });
        }
    }
    reports
}

/// Curvature regime of a space form as a two-sided bound.
fn regime(form: &SpaceForm) -> Result<CurvatureBound> {
    CurvatureBound::from_sectional(form.curvature)
}

fn random_unit_tangent(form: &SpaceForm, x: &[f64], rng: &mut ChaCha8Rng, orthogonal_to: Option<&[f64]>) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..form.model_len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut t = form.project_tangent(x, &w);
        if let Some(g) = orthogonal_to {
            let c = form.inner(&t, g);
            for (ti, gi) in t.iter_mut().zip(g) {
                *ti -= c * gi;
            }
        }
        let n2 = form.inner(&t, &t);
        if n2 > 1e-3 {
            let n = n2.sqrt();
            return t.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Compares the closed-form space-form Hessian of `rho` (from geodesic
/// second derivatives) with the comparison functions at random samples:
/// `Hess rho(X, X) = mu (|X|^2 - <grad rho, X>^2)`, the `rho^2` row
/// `2 (rho'^2 + rho rho'')`, and the trace `(n-1) mu` against the
/// Laplacian comparison range.
pub fn verify_hessian_comparison(form: &SpaceForm, samples: usize, seed: u64) -> EigenBoundReport {
    let k = form.curvature;
    let rep = EigenBoundReport::new(&format!("space-form-K{k}"), "hessian");
    run(rep, |rep| {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be >= 1".into()));
        }
        let reg = regime(form)?;
        let rho_max = match reg {
            CurvatureBound::Positive(a) => 0.95 * std::f64::consts::FRAC_PI_2 / a,
            CurvatureBound::Negative(a) => 5.0 / a,
            CurvatureBound::Zero => 10.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = form.origin();
        let n = form.dim;
        let (mut e_perp, mut e_general, mut e_rho2, mut e_trace, mut e_radial) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let rho = rng.gen_range(0.05 * rho_max..rho_max);
            let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-12);
            let v: Vec<f64> = dir.iter().map(|c| c * rho / len).collect();
            let x = form.exp_origin(&v)?;
            let rho = form.distance(&p, &x)?;
            let grad = form.distance_gradient(&p, &x)?;
            let m0 = mu0(rho, reg)?;
            let m1 = mu1(rho, reg)?;
            let scale = m0.abs().max(1.0);

            let perp = random_unit_tangent(form, &x, &mut rng, Some(&grad));
            let hess_perp = form.geodesic_second_derivative(&p, &x, &perp)?;
            e_perp = e_perp.max((hess_perp - m0).abs().max((hess_perp - m1).abs()) / scale);
            e_rho2 = e_rho2.max((2.0 * rho * hess_perp - 2.0 * rho * m0).abs() / (rho * scale));

            let general = random_unit_tangent(form, &x, &mut rng, None);
            let c = form.inner(&grad, &general);
            let hess = form.geodesic_second_derivative(&p, &x, &general)?;
            e_general = e_general.max((hess - m0 * (1.0 - c * c)).abs() / scale);
            let rho2 = 2.0 * (c * c + rho * hess);
            let rho2_expected = 2.0 * c * c + 2.0 * rho * m0 * (1.0 - c * c);
            e_rho2 = e_rho2.max((rho2 - rho2_expected).abs() / (rho * scale));

            e_radial = e_radial.max(form.geodesic_second_derivative(&p, &x, &grad)?.abs());

            let trace: f64 = form
                .tangent_basis(&x)
                .iter()
                .map(|b| form.geodesic_second_derivative(&p, &x, b))
                .sum::<Result<f64>>()?;
            let range = laplacian_comparison_range(n, rho, reg, reg)?;
            e_trace = e_trace.max(((trace - range.lower).abs().max((trace - range.upper).abs())) / scale);
        }
        rep.observe("samples", samples as f64);
        rep.observe("max_error_hessian", e_perp.max(e_general));
        rep.observe("max_error_rho2", e_rho2);
        rep.observe("max_error_trace", e_trace);
        rep.observe("max_error_radial", e_radial);
        let worst = e_perp.max(e_general).max(e_rho2).max(e_trace).max(e_radial);
        if !(worst <= 1e-10) {
            rep.verdict = Verdict::Fail;
            rep.message = Some(format!("worst relative deviation {worst:e} exceeds 1e-10"));
        }
        Ok(())
    })
}

/// For each radius and field, `q(r) = min div X / (2 max |X|)` on the
/// Euclidean disk `B_r` against its discrete `lambda_1`: `q^2 <= lambda_1`
/// at every rung, and `lambda_1(B_r)` must decrease in `r`.
pub fn euclidean_nogo_scan(
    fields: &[FieldKind],
    radii: &[f64],
    ladder: &[usize],
    opts: EigenOptions,
) -> Vec<EigenBoundReport> {
    let mut by_field: Vec<Vec<EigenBoundReport>> = vec![Vec::new(); fields.len()];
    let form = SpaceForm::euclidean(2);
    let mut finest_lambda = Vec::new();
    for &r in radii {
        let mut rungs: Vec<Vec<RungReport>> = vec![Vec::new(); fields.len()];
        let mut q_finest = vec![0.0; fields.len()];
        let outcome = (|| -> Result<()> {
            for (i, &res) in ladder.iter().enumerate() {
                let mesh = geodesic_ball_mesh(&form, r, res)?;
                let eig = mesh_eigenpair(&mesh, opts)?;
                for (j, f) in fields.iter().enumerate() {
                    let x = match f {
                        FieldKind::Position => position_field(&mesh),
                        FieldKind::RadialUnit | FieldKind::DistanceGradient => radial_unit_field(&mesh)?,
                        FieldKind::Constant => constant_field(&mesh, [1.0, 0.0]),
                    };
                    let (d, s) = field_extremes(&mesh, &x)?;
                    let q = d / (2.0 * s);
                    let bound = q.max(0.0).powi(2);
                    let mut g = rung(res, mesh.mesh_size(), &eig, bound, relative_slack(i, ladder.len()) * bound);
                    g.inf_div = Some(d);
                    g.sup_norm = Some(s);
                    rungs[j].push(g);
                    q_finest[j] = q;
                }
                if i + 1 == ladder.len() {
                    finest_lambda.push(eig.lambda1);
                }
            }
            Ok(())
        })();
        for (j, f) in fields.iter().enumerate() {
            let mut rep = EigenBoundReport::new("euclidean-disk", "nogo");
            rep.field = Some(f.as_str().into());
            rep.radius = Some(r);
            match &outcome {
                Ok(()) => {
                    rep.bound = rungs[j].last().map(|g| g.bound);
                    rep.observe("q", q_finest[j]);
                    finish(&mut rep, std::mem::take(&mut rungs[j]));
                    if let Some(l) = rep.finest_lambda() {
                        rep.observe("lambda_r2", l * r * r);
                    }
                }
                Err(e) => {
                    rep.verdict = verdict_for_error(e);
                    rep.message = Some(e.to_string());
                }
            }
            by_field[j].push(rep);
        }
    }
    let decreasing = finest_lambda.len() == radii.len() && finest_lambda.windows(2).all(|w| w[1] < w[0]);
    let mut out: Vec<EigenBoundReport> = by_field.into_iter().flatten().collect();
    if !decreasing {
        for rep in &mut out {
            if rep.verdict == Verdict::Pass {
                rep.verdict = Verdict::Fail;
                rep.message = Some("lambda_1(B_r) does not decrease in r".into());
            }
        }
    }
    out
}
