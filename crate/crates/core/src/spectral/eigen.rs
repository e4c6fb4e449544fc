use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RiemannianMesh;
use crate::spectral::cg::{pcg, Preconditioner};
use crate::spectral::sparse::dot;
use crate::spectral::{assemble, SparseSymmetricOperator};

/// Stiffness and mass restricted to the interior vertices.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub stiffness: SparseSymmetricOperator,
    pub mass: SparseSymmetricOperator,
    /// `interior[k]` is the full-mesh index of unknown `k`.
    pub interior: Vec<usize>,
    pub n_total: usize,
}

impl DirichletProblem {
    pub fn dim(&self) -> usize {
        self.interior.len()
    }

    /// Re-expands an interior vector with zero boundary values.
    pub fn expand(&self, v: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_total];
        for (k, &i) in self.interior.iter().enumerate() {
            full[i] = v[k];
        }
        full
    }
}

/// Removes the rows and columns of `boundary` from both forms.
pub fn dirichlet_reduce(
    a: &SparseSymmetricOperator,
    b: &SparseSymmetricOperator,
    boundary: &[usize],
) -> Result<DirichletProblem> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::SizeMismatch(format!("stiffness is {n}x{n}, mass is {0}x{0}", b.dim())));
    }
    if boundary.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let mut on_boundary = vec![false; n];
    for &i in boundary {
        if i >= n {
            return Err(Error::InvalidArgument(format!("boundary index {i} out of range {n}")));
        }
        on_boundary[i] = true;
    }
    let interior: Vec<usize> = (0..n).filter(|&i| !on_boundary[i]).collect();
    if interior.is_empty() {
        return Err(Error::NoInteriorUnknowns);
    }
    Ok(DirichletProblem { stiffness: a.restrict(&interior), mass: b.restrict(&interior), interior, n_total: n })
}

/// Assembles and reduces in one step.
pub fn dirichlet_problem(mesh: &RiemannianMesh) -> Result<DirichletProblem> {
    let (a, b) = assemble(mesh)?;
    dirichlet_reduce(&a, &b, mesh.boundary_vertices())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Bound on the Jacobi-scaled residual `|D^{-1}(A v - lambda B v)| / |v|`.
    pub tol: f64,
    /// Bound on the relative eigenvalue change between iterations.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Relative residual of the inner CG solves.
    pub inner_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-6, rel_tol: 1e-8, max_iter: 10_000, inner_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Interior values, `B`-normalized with positive sum.
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub unknowns: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mesh_size: Option<f64>,
}

impl EigenResult {
    pub fn with_mesh(mut self, mesh: &RiemannianMesh, resolution: usize) -> Self {
        self.resolution = Some(resolution);
        self.mesh_size = Some(mesh.mesh_size());
        self
    }

    /// Fraction of entries sharing the majority sign.
    pub fn sign_coherence(&self) -> f64 {
        let pos = self.eigenvector.iter().filter(|&&x| x > 0.0).count();
        let neg = self.eigenvector.iter().filter(|&&x| x < 0.0).count();
        pos.max(neg) as f64 / self.eigenvector.len().max(1) as f64
    }
}

/// `f^T A f / f^T B f`.
pub fn rayleigh_quotient(a: &SparseSymmetricOperator, b: &SparseSymmetricOperator, f: &[f64]) -> Result<f64> {
    if f.len() != a.dim() || f.len() != b.dim() {
        return Err(Error::SizeMismatch(format!("field of length {} for operators of size {}", f.len(), a.dim())));
    }
    let den = b.quadratic_form(f);
    if !(den > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok(a.quadratic_form(f) / den)
}

fn scaled_residual(p: &DirichletProblem, inv_diag: &[f64], v: &[f64], lambda: f64) -> f64 {
    let av = p.stiffness.apply(v);
    let bv = p.mass.apply(v);
    let r2: f64 = av.iter().zip(&bv).zip(inv_diag).map(|((a, b), d)| ((a - lambda * b) * d).powi(2)).sum();
    r2.sqrt() / dot(v, v).sqrt()
}

/// Smallest generalized eigenpair of `(A, B)` by inverse iteration with
/// preconditioned CG inner solves, started from the all-ones vector.
pub fn smallest_eigenpair(p: &DirichletProblem, opts: EigenOptions) -> Result<EigenResult> {
    if !(opts.tol > 0.0) || !(opts.rel_tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidArgument("eigensolver tolerances must be positive and max_iter >= 1".into()));
    }
    let n = p.dim();
    let diag = p.stiffness.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Indefinite(format!("stiffness diagonal entry {i} is {}", diag[i])));
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let precond = Preconditioner::incomplete_cholesky(&p.stiffness)?;

    let normalize = |v: &mut Vec<f64>| -> Result<()> {
        let nb = p.mass.quadratic_form(v);
        if !(nb > 0.0) {
            return Err(Error::Indefinite(format!("v^T B v = {nb}")));
        }
        let s = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 } / nb.sqrt();
        v.iter_mut().for_each(|x| *x *= s);
        Ok(())
    };

    let mut v = vec![1.0; n];
    normalize(&mut v)?;
    let mut lambda = p.stiffness.quadratic_form(&v);
    if !(lambda > 0.0) {
        return Err(Error::Indefinite(format!("Rayleigh quotient {lambda} of the start vector")));
    }
    let mut residual = f64::INFINITY;
    let mut change = 1.0f64;
    let inner_max = 20 * n + 100;
    for it in 1..=opts.max_iter {
        let rhs = p.mass.apply(&v);
        let mut w: Vec<f64> = v.iter().map(|x| x / lambda).collect();
        // Inexact solves while the eigenvalue is still moving.
        let inner_tol = (1e-2 * change).clamp(opts.inner_tol, 1e-4f64.max(opts.inner_tol));
        pcg(&p.stiffness, &rhs, &mut w, &precond, inner_tol, inner_max)?;
        normalize(&mut w)?;
        let next = p.stiffness.quadratic_form(&w);
        if !(next > 0.0) {
            return Err(Error::Indefinite(format!("Rayleigh quotient {next} at iteration {it}")));
        }
        change = (next - lambda).abs() / next;
        v = w;
        lambda = next;
        residual = scaled_residual(p, &inv_diag, &v, lambda);
        if residual <= opts.tol && change <= opts.rel_tol {
            return Ok(EigenResult {
                lambda1: lambda,
                eigenvector: v,
                residual,
                iterations: it,
                unknowns: n,
                resolution: None,
                mesh_size: None,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
        best: Box::new(EigenResult {
            lambda1: lambda,
            eigenvector: v,
            residual,
            iterations: opts.max_iter,
            unknowns: n,
            resolution: None,
            mesh_size: None,
        }),
    })
}

/// Assembles, reduces and solves.
pub fn mesh_eigenpair(mesh: &RiemannianMesh, opts: EigenOptions) -> Result<EigenResult> {
    smallest_eigenpair(&dirichlet_problem(mesh)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_ball_mesh, interval_mesh, square_mesh, SpaceForm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn reduction_sizes_and_errors() {
        let mesh = interval_mesh(1.0, 10).unwrap();
        let (a, b) = assemble(&mesh).unwrap();
        assert_eq!(dirichlet_reduce(&a, &b, &[0, 10]).unwrap().dim(), 9);
        assert!(matches!(dirichlet_reduce(&a, &b, &[]), Err(Error::EmptyBoundary)));
        let all: Vec<usize> = (0..11).collect();
        assert!(matches!(dirichlet_reduce(&a, &b, &all), Err(Error::NoInteriorUnknowns)));
        let disk = geodesic_ball_mesh(&SpaceForm::euclidean(2), 1.0, 8).unwrap();
        let p = dirichlet_problem(&disk).unwrap();
        assert_eq!(p.dim(), disk.n_vertices() - 48);
    }

    #[test]
    fn interval_eigenvalue() {
        let r = mesh_eigenpair(&interval_mesh(1.0, 1000).unwrap(), EigenOptions::default()).unwrap();
        let pi2 = PI * PI;
        assert!(r.lambda1 >= pi2 && r.lambda1 <= pi2 * (1.0 + 1e-3), "{}", r.lambda1);
        assert!(r.residual <= 1e-6);
    }

    #[test]
    fn square_eigenvalue_and_positivity() {
        let r = mesh_eigenpair(&square_mesh(1.0, 100).unwrap(), EigenOptions::default()).unwrap();
        let exact = 2.0 * PI * PI;
        assert!(r.lambda1 >= exact && (r.lambda1 - exact) / exact < 0.01);
        assert!(r.sign_coherence() >= 0.99);
    }

    #[test]
    fn rayleigh_quotient_properties() {
        let mesh = interval_mesh(1.0, 1000).unwrap();
        let p = dirichlet_problem(&mesh).unwrap();
        let r = smallest_eigenpair(&p, EigenOptions::default()).unwrap();
        let rq = rayleigh_quotient(&p.stiffness, &p.mass, &r.eigenvector).unwrap();
        assert!((rq - r.lambda1).abs() <= 1e-10 * r.lambda1);
        let mut hat = vec![0.0; p.dim()];
        hat[400] = 1.0;
        assert!(rayleigh_quotient(&p.stiffness, &p.mass, &hat).unwrap() >= PI * PI);
        assert!(matches!(rayleigh_quotient(&p.stiffness, &p.mass, &vec![0.0; p.dim()]), Err(Error::ZeroField)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let f: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(rayleigh_quotient(&p.stiffness, &p.mass, &f).unwrap() >= r.lambda1 - r.residual);
        }
    }

    #[test]
    fn cone_function_quotient_on_unit_disk() {
        let mesh = geodesic_ball_mesh(&SpaceForm::euclidean(2), 1.0, 100).unwrap();
        let p = dirichlet_problem(&mesh).unwrap();
        let f: Vec<f64> = p.interior.iter().map(|&i| {
            let v = mesh.vertices()[i];
            1.0 - v[0].hypot(v[1])
        }).collect();
        let q = rayleigh_quotient(&p.stiffness, &p.mass, &f).unwrap();
        assert!((q - 6.0).abs() < 0.05, "{q}");
        assert!(q >= 5.783);
    }

    #[test]
    fn non_convergence_carries_best_iterate() {
        let p = dirichlet_problem(&square_mesh(1.0, 20).unwrap()).unwrap();
        let opts = EigenOptions { max_iter: 1, tol: 1e-14, ..Default::default() };
        match smallest_eigenpair(&p, opts) {
            Err(Error::NonConvergence { best, .. }) => assert!(best.lambda1 > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_omits_eigenvector() {
        let r = mesh_eigenpair(&interval_mesh(1.0, 10).unwrap(), EigenOptions::default()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("lambda1") && !s.contains("eigenvector"));
    }
}
