//! Scalar and vector fields on meshes, and the pullback of the ambient
//! distance function through an immersion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ParametricImmersion, RiemannianMesh};

/// One value per mesh vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

/// One chart-coordinate tangent vector per mesh element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub vectors: Vec<[f64; 2]>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn check(&self, mesh: &RiemannianMesh) -> Result<()> {
        if self.values.len() != mesh.n_vertices() {
            return Err(Error::SizeMismatch(format!(
                "scalar field has {} values for {} vertices",
                self.values.len(),
                mesh.n_vertices()
            )));
        }
        Ok(())
    }

    /// Minimum over the given vertex indices.
    pub fn min_over(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.values[i]).fold(f64::INFINITY, f64::min)
    }
}

impl VectorField {
    pub fn new(vectors: Vec<[f64; 2]>) -> Self {
        VectorField { vectors }
    }

    pub fn check(&self, mesh: &RiemannianMesh) -> Result<()> {
        if self.vectors.len() != mesh.n_elements() {
            return Err(Error::SizeMismatch(format!(
                "vector field has {} vectors for {} elements",
                self.vectors.len(),
                mesh.n_elements()
            )));
        }
        Ok(())
    }

    /// Per-element lengths measured with the element metric.
    pub fn norms(&self, mesh: &RiemannianMesh) -> Result<Vec<f64>> {
        self.check(mesh)?;
        Ok(self
            .vectors
            .iter()
            .zip(mesh.metrics())
            .map(|(x, g)| {
                if mesh.dim() == 1 {
                    (g.g11 * x[0] * x[0]).sqrt()
                } else {
                    g.quad(*x).max(0.0).sqrt()
                }
            })
            .collect())
    }

    pub fn max_norm(&self, mesh: &RiemannianMesh) -> Result<f64> {
        Ok(self.norms(mesh)?.into_iter().fold(0.0, f64::max))
    }
}

/// `f(v) = dist_N(p, phi(v))` at every mesh vertex.
pub fn pullback_distance_field(
    imm: &dyn ParametricImmersion,
    p: &[f64],
    mesh: &RiemannianMesh,
) -> Result<ScalarField> {
    let n = imm.ambient();
    n.check_point(p)?;
    let len = n.model_len();
    let values = mesh
        .vertices()
        .iter()
        .map(|&x| imm.point(x).map(|y| n.distance_unchecked(p, &y[..len])))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarField { values })
}

/// Metric gradient of the piecewise-linear interpolant of `field`.
pub fn tangential_gradient(mesh: &RiemannianMesh, field: &ScalarField) -> Result<VectorField> {
    field.check(mesh)?;
    let mut vectors = Vec::with_capacity(mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let geo = mesh.element_geometry(e)?;
        let nodes = mesh.elements().nodes(e);
        let mut df = [0.0, 0.0];
        for (k, &n) in nodes.iter().enumerate() {
            df[0] += field.values[n] * geo.grads[k][0];
            df[1] += field.values[n] * geo.grads[k][1];
        }
        vectors.push(if mesh.dim() == 1 { [geo.inv_metric.g11 * df[0], 0.0] } else { geo.inv_metric.apply(df) });
    }
    Ok(VectorField { vectors })
}

/// Lumped weak divergence: `div_i = -(sum_T |T| X_T . d(lambda_i)) / m_i`
/// with `m_i` the lumped mass of vertex `i`. Boundary values omit the
/// boundary flux and are not meaningful.
pub fn weak_divergence(mesh: &RiemannianMesh, x: &VectorField) -> Result<ScalarField> {
    x.check(mesh)?;
    let nv = mesh.n_vertices();
    let mut flux = vec![0.0; nv];
    let mut mass = vec![0.0; nv];
    for e in 0..mesh.n_elements() {
        let geo = mesh.element_geometry(e)?;
        let nodes = mesh.elements().nodes(e);
        let share = geo.volume / nodes.len() as f64;
        let v = x.vectors[e];
        for (k, &n) in nodes.iter().enumerate() {
            flux[n] -= geo.volume * (v[0] * geo.grads[k][0] + v[1] * geo.grads[k][1]);
            mass[n] += share;
        }
    }
    Ok(ScalarField { values: flux.iter().zip(&mass).map(|(f, m)| f / m).collect() })
}

/// Chart position `X = (u, v)` sampled at element barycenters.
pub fn position_field(mesh: &RiemannianMesh) -> VectorField {
    VectorField { vectors: (0..mesh.n_elements()).map(|e| mesh.element_barycenter(e)).collect() }
}

/// `X = x / |x|` at element barycenters (chart norm).
pub fn radial_unit_field(mesh: &RiemannianMesh) -> Result<VectorField> {
    let vectors = (0..mesh.n_elements())
        .map(|e| {
            let c = mesh.element_barycenter(e);
            let r = c[0].hypot(c[1]);
            if r > 0.0 {
                Ok([c[0] / r, c[1] / r])
            } else {
                Err(Error::EvaluationAtPole)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField { vectors })
}

pub fn constant_field(mesh: &RiemannianMesh, v: [f64; 2]) -> VectorField {
    VectorField { vectors: vec![v; mesh.n_elements()] }
}

/// Decomposition of the ambient `grad rho` at an immersed point into its
/// tangential part `grad f` and normal part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackGradient {
    pub rho: f64,
    /// Chart components of `df`.
    pub differential: [f64; 2],
    /// Chart components of `grad f = g^{-1} df`.
    pub gradient: [f64; 2],
    /// `|grad f|^2`.
    pub tangential_norm2: f64,
    /// `<grad rho, nu>`.
    pub normal_component: f64,
    /// `g^{ij} h_ij`.
    pub mean_curvature_trace: f64,
}

pub fn pullback_gradient(imm: &dyn ParametricImmersion, p: &[f64], x: [f64; 2]) -> Result<PullbackGradient> {
    let n = imm.ambient();
    n.check_point(p)?;
    let len = n.model_len();
    let frame = imm.frame(x)?;
    let y = &frame.point[..len];
    let rho = n.distance_unchecked(p, y);
    if !(rho > 0.0) {
        return Err(Error::EvaluationAtPole);
    }
    let grad_rho = n.distance_gradient(p, y)?;
    let df = [n.inner(&grad_rho, &frame.tangents[0][..len]), n.inner(&grad_rho, &frame.tangents[1][..len])];
    let inv = frame.metric.inverse().ok_or(Error::ImmersionDegenerate(x[0], x[1]))?;
    let gradient = inv.apply(df);
    Ok(PullbackGradient {
        rho,
        differential: df,
        gradient,
        tangential_norm2: df[0] * gradient[0] + df[1] * gradient[1],
        normal_component: n.inner(&grad_rho, &frame.normal[..len]),
        mean_curvature_trace: frame.mean_curvature_trace(),
    })
}

/// Exact `grad f` evaluated at element barycenters.
pub fn analytic_distance_gradient(
    imm: &dyn ParametricImmersion,
    p: &[f64],
    mesh: &RiemannianMesh,
) -> Result<VectorField> {
    let vectors = (0..mesh.n_elements())
        .map(|e| pullback_gradient(imm, p, mesh.element_barycenter(e)).map(|g| g.gradient))
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorField { vectors })
}

/// `Delta f` for `f = rho o phi`, from the traced Hessian identity
/// `Delta f = sum_i Hess rho(e_i, e_i) + <grad rho, H>` with the closed-form
/// Hessian of the space-form distance.
pub fn traced_hessian_laplacian(imm: &dyn ParametricImmersion, p: &[f64], x: [f64; 2]) -> Result<f64> {
    let g = pullback_gradient(imm, p, x)?;
    let mu = imm.ambient().distance_hessian_factor(g.rho);
    Ok(mu * (2.0 - g.tangential_norm2) + g.mean_curvature_trace * g.normal_component)
}
