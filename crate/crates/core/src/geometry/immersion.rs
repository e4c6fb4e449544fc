//! Analytic immersions of 2D chart rectangles into 3D space forms.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Metric2, SpaceForm};

/// Closed parameter rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartRect {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl ChartRect {
    pub fn square(half_width: f64) -> Self {
        ChartRect { u: (-half_width, half_width), v: (-half_width, half_width) }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let tol = 1e-12 * (self.u.1 - self.u.0).abs().max((self.v.1 - self.v.0).abs());
        x[0] >= self.u.0 - tol && x[0] <= self.u.1 + tol && x[1] >= self.v.0 - tol && x[1] <= self.v.1 + tol
    }

    fn check(&self, x: [f64; 2]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ChartDomain(format!("({}, {}) lies outside {:?} x {:?}", x[0], x[1], self.u, self.v)))
        }
    }
}

/// Position and first two partial derivatives of an immersion at a chart
/// point, in the model coordinates of the ambient space form. Unused trailing
/// coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub point: [f64; 4],
    pub du: [[f64; 4]; 2],
    /// `phi_uu`, `phi_uv`, `phi_vv`.
    pub d2: [[f64; 4]; 3],
}

/// Induced geometry at one chart point.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub point: [f64; 4],
    pub tangents: [[f64; 4]; 2],
    pub metric: Metric2,
    /// Unit normal inside the ambient tangent space.
    pub normal: [f64; 4],
    /// Second fundamental form `h_ij = <phi_ij, nu>` as `[h11, h12, h22]`.
    pub second: [f64; 3],
}

impl Frame {
    /// `g^{ij} h_ij`: the signed length of the unnormalized mean curvature vector.
    pub fn mean_curvature_trace(&self) -> f64 {
        let inv = self.metric.inverse().expect("frame metric is positive definite");
        inv.g11 * self.second[0] + 2.0 * inv.g12 * self.second[1] + inv.g22 * self.second[2]
    }

    pub fn mean_curvature_vector(&self) -> [f64; 4] {
        let tr = self.mean_curvature_trace();
        self.normal.map(|c| tr * c)
    }
}

/// A smooth map from a chart rectangle into a 3D space form.
pub trait ParametricImmersion: Debug + Send + Sync {
    fn ambient(&self) -> SpaceForm;

    fn chart(&self) -> ChartRect;

    /// Analytic derivatives at `x`, which must lie in [`Self::chart`].
    fn jet(&self, x: [f64; 2]) -> Result<Jet>;

    /// Closed-form `|H|` when the surface is homogeneous.
    fn analytic_mean_curvature(&self) -> Option<f64> {
        None
    }

    fn point(&self, x: [f64; 2]) -> Result<[f64; 4]> {
        Ok(self.jet(x)?.point)
    }

    fn first_fundamental_form(&self, x: [f64; 2]) -> Result<Metric2> {
        let n = self.ambient();
        let j = self.jet(x)?;
        let g = metric_of(&n, &j);
        check_metric(g, x)?;
        Ok(g)
    }

    fn frame(&self, x: [f64; 2]) -> Result<Frame> {
        let n = self.ambient();
        let len = n.model_len();
        let j = self.jet(x)?;
        let g = metric_of(&n, &j);
        check_metric(g, x)?;
        let ip = |a: &[f64; 4], b: &[f64; 4]| n.inner(&a[..len], &b[..len]);

        let raw = normal_direction(&n, &j);
        let nn = ip(&raw, &raw);
        if !(nn > 1e-20 * (g.g11 * g.g22)) {
            return Err(Error::ImmersionDegenerate(x[0], x[1]));
        }
        let normal = raw.map(|c| c / nn.sqrt());
        let second = [ip(&j.d2[0], &normal), ip(&j.d2[1], &normal), ip(&j.d2[2], &normal)];
        Ok(Frame { point: j.point, tangents: j.du, metric: g, normal, second })
    }
}

/// Unnormalized normal: the cross product of the tangents in `R^3`, or the
/// generalized cross product of `(point, du, dv)` in the 4D model (with the
/// time index raised on the hyperboloid).
fn normal_direction(n: &SpaceForm, j: &Jet) -> [f64; 4] {
    let (a, b) = (j.du[0], j.du[1]);
    if n.model_len() == 3 {
        return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0], 0.0];
    }
    let p = j.point;
    let det3 = |c: [usize; 3]| {
        p[c[0]] * (a[c[1]] * b[c[2]] - a[c[2]] * b[c[1]]) - p[c[1]] * (a[c[0]] * b[c[2]] - a[c[2]] * b[c[0]])
            + p[c[2]] * (a[c[0]] * b[c[1]] - a[c[1]] * b[c[0]])
    };
    let mut v = [det3([1, 2, 3]), -det3([0, 2, 3]), det3([0, 1, 3]), -det3([0, 1, 2])];
    if n.curvature < 0.0 {
        v[0] = -v[0];
    }
    v
}

fn metric_of(n: &SpaceForm, j: &Jet) -> Metric2 {
    let len = n.model_len();
    let ip = |a: &[f64; 4], b: &[f64; 4]| n.inner(&a[..len], &b[..len]);
    Metric2 {
        g11: ip(&j.du[0], &j.du[0]),
        g12: ip(&j.du[0], &j.du[1]),
        g22: ip(&j.du[1], &j.du[1]),
    }
}

fn check_metric(g: Metric2, x: [f64; 2]) -> Result<()> {
    let scale = g.g11.abs() * g.g22.abs();
    if !(g.g11 > 0.0 && g.det() > 1e-14 * scale) || !g.det().is_finite() {
        return Err(Error::ImmersionDegenerate(x[0], x[1]));
    }
    Ok(())
}

/// Length of the mean curvature vector (trace convention: twice the average
/// of the principal curvatures).
pub fn mean_curvature_norm(imm: &dyn ParametricImmersion, x: [f64; 2]) -> Result<f64> {
    Ok(imm.frame(x)?.mean_curvature_trace().abs())
}

/// The plane `z = 0` in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub half_width: f64,
}

impl ParametricImmersion for Plane {
    fn ambient(&self) -> SpaceForm {
        SpaceForm::euclidean(3)
    }

    fn chart(&self) -> ChartRect {
        ChartRect::square(self.half_width)
    }

    fn jet(&self, x: [f64; 2]) -> Result<Jet> {
        self.chart().check(x)?;
        Ok(Jet {
            point: [x[0], x[1], 0.0, 0.0],
            du: [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
            d2: [[0.0; 4]; 3],
        })
    }

    fn analytic_mean_curvature(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Circular cylinder of radius `radius` around the z axis, parametrized by
/// arc length `u` around the axis and height `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub radius: f64,
    pub half_length: f64,
}

impl ParametricImmersion for Cylinder {
    fn ambient(&self) -> SpaceForm {
        SpaceForm::euclidean(3)
    }

    fn chart(&self) -> ChartRect {
        let w = 3.0 * self.radius;
        ChartRect { u: (-w, w), v: (-self.half_length, self.half_length) }
    }

    fn jet(&self, x: [f64; 2]) -> Result<Jet> {
        self.chart().check(x)?;
        let a = self.radius;
        let (s, c) = (x[0] / a).sin_cos();
        Ok(Jet {
            point: [a * c, a * s, x[1], 0.0],
            du: [[-s, c, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
            d2: [[-c / a, -s / a, 0.0, 0.0], [0.0; 4], [0.0; 4]],
        })
    }

    fn analytic_mean_curvature(&self) -> Option<f64> {
        Some(1.0 / self.radius)
    }
}

/// Round sphere of radius `radius` centered at the origin of `R^3`, in the
/// central-projection chart `(u, v) -> R (u, v, 1) / |(u, v, 1)|` around the
/// north pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundSphere {
    pub radius: f64,
    pub half_width: f64,
}

impl ParametricImmersion for RoundSphere {
    fn ambient(&self) -> SpaceForm {
        SpaceForm::euclidean(3)
    }

    fn chart(&self) -> ChartRect {
        ChartRect::square(self.half_width)
    }

    fn jet(&self, x: [f64; 2]) -> Result<Jet> {
        self.chart().check(x)?;
        let r = self.radius;
        let w = [x[0], x[1], 1.0];
        let n2 = 1.0 + x[0] * x[0] + x[1] * x[1];
        let n = n2.sqrt();
        let (n3, n5) = (n * n2, n * n2 * n2);
        let mut jet = Jet { point: [0.0; 4], du: [[0.0; 4]; 2], d2: [[0.0; 4]; 3] };
        for k in 0..3 {
            jet.point[k] = r * w[k] / n;
        }
        for i in 0..2 {
            for k in 0..3 {
                let e = if k == i { 1.0 } else { 0.0 };
                jet.du[i][k] = r * (e / n - w[k] * x[i] / n3);
            }
        }
        for (slot, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            let dij = if i == j { 1.0 } else { 0.0 };
            for k in 0..3 {
                let ei = if k == i { 1.0 } else { 0.0 };
                let ej = if k == j { 1.0 } else { 0.0 };
                jet.d2[slot][k] = r
                    * (-(ei * x[j] + ej * x[i] + w[k] * dij) / n3 + 3.0 * w[k] * x[i] * x[j] / n5);
            }
        }
        Ok(jet)
    }

    fn analytic_mean_curvature(&self) -> Option<f64> {
        Some(2.0 / self.radius)
    }
}

/// Equidistant surface at signed distance `t` from the totally geodesic plane
/// `{x_3 = 0}` of the hyperboloid model of `H^3(-1)`; `t = 0` is the plane
/// itself. The chart is geodesic normal coordinates of that plane around the
/// origin, pushed out along the normal geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equidistant {
    pub t: f64,
    pub half_width: f64,
}

impl Equidistant {
    pub fn totally_geodesic(half_width: f64) -> Self {
        Equidistant { t: 0.0, half_width }
    }
}

/// `A = sinh s / s`, `B = A'/s`, `C = B'/s` as functions of `q = s^2`.
fn radial_coefficients(q: f64) -> (f64, f64, f64) {
    if q < 1.0 {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        // term_n = q^n / (2n+1)!
        let mut term = 1.0;
        let mut qn = 1.0;
        let mut fact = 1.0; // (2n+1)!
        for n in 0..20 {
            let nf = n as f64;
            let f3 = fact * (2.0 * nf + 2.0) * (2.0 * nf + 3.0);
            let f5 = f3 * (2.0 * nf + 4.0) * (2.0 * nf + 5.0);
            a += term;
            b += 2.0 * (nf + 1.0) * qn / f3;
            c += 4.0 * (nf + 2.0) * (nf + 1.0) * qn / f5;
            qn *= q;
            fact = f3;
            term = qn / fact;
        }
        (a, b, c)
    } else {
        let s = q.sqrt();
        let a = s.sinh() / s;
        let b = (s * s.cosh() - s.sinh()) / (q * s);
        let c = (a - 3.0 * b) / q;
        (a, b, c)
    }
}

impl ParametricImmersion for Equidistant {
    fn ambient(&self) -> SpaceForm {
        SpaceForm::hyperbolic(3)
    }

    fn chart(&self) -> ChartRect {
        ChartRect::square(self.half_width)
    }

    fn jet(&self, x: [f64; 2]) -> Result<Jet> {
        self.chart().check(x)?;
        let q = x[0] * x[0] + x[1] * x[1];
        let (a, b, c) = radial_coefficients(q);
        let (ch, sh) = (self.t.cosh(), self.t.sinh());
        let psi0 = if q < 1.0 { cosh_series(q) } else { q.sqrt().cosh() };
        let mut jet = Jet { point: [0.0; 4], du: [[0.0; 4]; 2], d2: [[0.0; 4]; 3] };
        jet.point = [ch * psi0, ch * a * x[0], ch * a * x[1], sh];
        for j in 0..2 {
            jet.du[j][0] = ch * a * x[j];
            for i in 0..2 {
                let d = if i == j { 1.0 } else { 0.0 };
                jet.du[j][i + 1] = ch * (a * d + b * x[i] * x[j]);
            }
        }
        for (slot, (j, k)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            let djk = if j == k { 1.0 } else { 0.0 };
            jet.d2[slot][0] = ch * (a * djk + b * x[j] * x[k]);
            for i in 0..2 {
                let dij = if i == j { 1.0 } else { 0.0 };
                let dik = if i == k { 1.0 } else { 0.0 };
                jet.d2[slot][i + 1] =
                    ch * (b * (dij * x[k] + dik * x[j] + djk * x[i]) + c * x[i] * x[j] * x[k]);
            }
        }
        Ok(jet)
    }

    fn analytic_mean_curvature(&self) -> Option<f64> {
        Some(2.0 * self.t.tanh().abs())
    }
}

fn cosh_series(q: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 0..20 {
        sum += term;
        let nf = n as f64;
        term *= q / ((2.0 * nf + 1.0) * (2.0 * nf + 2.0));
    }
    sum
}
