//! Constant-curvature model spaces.
//!
//! `K = 0` is Cartesian `R^n`, `K < 0` is the upper sheet of the hyperboloid
//! `<x, x>_L = -R^2` in Minkowski space (time coordinate first), `K > 0` is
//! the round sphere of radius `R` in `R^{n+1}`, with `R = 1/sqrt|K|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    pub dim: usize,
    pub curvature: f64,
}

impl SpaceForm {
    pub fn new(dim: usize, curvature: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("space form dimension must be >= 1".into()));
        }
        if !curvature.is_finite() {
            return Err(Error::InvalidArgument(format!("curvature must be finite, got {curvature}")));
        }
        Ok(SpaceForm { dim, curvature })
    }

    pub fn euclidean(dim: usize) -> Self {
        SpaceForm { dim, curvature: 0.0 }
    }

    pub fn hyperbolic(dim: usize) -> Self {
        SpaceForm { dim, curvature: -1.0 }
    }

    pub fn sphere(dim: usize) -> Self {
        SpaceForm { dim, curvature: 1.0 }
    }

    /// Number of model coordinates of a point.
    pub fn model_len(&self) -> usize {
        if self.curvature == 0.0 {
            self.dim
        } else {
            self.dim + 1
        }
    }

    /// Curvature radius `1/sqrt|K|`; infinite when flat.
    pub fn radius(&self) -> f64 {
        if self.curvature == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.curvature.abs().sqrt()
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        if self.curvature > 0.0 {
            std::f64::consts::PI * self.radius()
        } else {
            f64::INFINITY
        }
    }

    /// Ambient bilinear form: Lorentzian for `K < 0`, Euclidean otherwise.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        if self.curvature < 0.0 {
            dot - 2.0 * a[0] * b[0]
        } else {
            dot
        }
    }

    /// The base point: the Cartesian origin, or `(R, 0, ..., 0)`.
    pub fn origin(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.model_len()];
        if self.curvature != 0.0 {
            o[0] = self.radius();
        }
        o
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.model_len() {
            return Err(Error::ChartDomain(format!(
                "expected {} model coordinates, got {}",
                self.model_len(),
                x.len()
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::ChartDomain("non-finite coordinate".into()));
        }
        if self.curvature == 0.0 {
            return Ok(());
        }
        let r2 = self.radius().powi(2);
        let sign = if self.curvature < 0.0 { -1.0 } else { 1.0 };
        let scale = x.iter().map(|c| c * c).sum::<f64>().max(r2);
        if (self.inner(x, x) - sign * r2).abs() > 1e-9 * scale {
            return Err(Error::ChartDomain(format!(
                "point is off the model quadric (K = {})",
                self.curvature
            )));
        }
        if self.curvature < 0.0 && x[0] <= 0.0 {
            return Err(Error::ChartDomain("point is on the lower hyperboloid sheet".into()));
        }
        Ok(())
    }

    /// Geodesic distance. Uses chord formulas, which stay accurate for
    /// nearby points.
    pub fn distance(&self, p: &[f64], x: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(x)?;
        Ok(self.distance_unchecked(p, x))
    }

    pub(crate) fn distance_unchecked(&self, p: &[f64], x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let chord2 = self.inner(&d, &d).max(0.0);
        if self.curvature == 0.0 {
            chord2.sqrt()
        } else {
            let r = self.radius();
            let half = chord2.sqrt() / (2.0 * r);
            if self.curvature < 0.0 {
                2.0 * r * half.asinh()
            } else {
                2.0 * r * half.min(1.0).asin()
            }
        }
    }

    /// Tangent projection at `x`.
    pub fn project_tangent(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        if self.curvature == 0.0 {
            return w.to_vec();
        }
        let xx = self.inner(x, x);
        let c = self.inner(w, x) / xx;
        w.iter().zip(x).map(|(wi, xi)| wi - c * xi).collect()
    }

    /// Unit gradient of `rho = dist(p, .)` at `x`, in model coordinates.
    pub fn distance_gradient(&self, p: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let t = self.project_tangent(x, &d);
        let norm = self.inner(&t, &t).max(0.0).sqrt();
        if !(norm > 0.0) {
            return Err(Error::EvaluationAtPole);
        }
        Ok(t.into_iter().map(|c| c / norm).collect())
    }

    /// `sn_K(s)`: `R sinh(s/R)`, `s` or `R sin(s/R)`.
    pub fn sn(&self, s: f64) -> f64 {
        let r = self.radius();
        if self.curvature < 0.0 {
            r * (s / r).sinh()
        } else if self.curvature > 0.0 {
            r * (s / r).sin()
        } else {
            s
        }
    }

    /// `sn'/sn`: the eigenvalue of `Hess rho` on vectors orthogonal to
    /// `grad rho` in this space form.
    pub fn distance_hessian_factor(&self, rho: f64) -> f64 {
        let r = self.radius();
        if self.curvature < 0.0 {
            1.0 / (r * (rho / r).tanh())
        } else if self.curvature > 0.0 {
            1.0 / (r * (rho / r).tan())
        } else {
            1.0 / rho
        }
    }

    /// Second derivative of `rho` along the geodesic through `x` with unit
    /// initial velocity `v`, i.e. `Hess rho(v, v)`.
    ///
    /// Evaluated from the closed form of `rho(gamma(t))` in the model, not from
    /// the comparison functions.
    pub fn geodesic_second_derivative(&self, p: &[f64], x: &[f64], v: &[f64]) -> Result<f64> {
        let rho = self.distance(p, x)?;
        if !(rho > 0.0) {
            return Err(Error::EvaluationAtPole);
        }
        let vv = self.inner(v, v);
        if (vv - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("velocity must be unit, |v|^2 = {vv}")));
        }
        if self.curvature == 0.0 {
            let w: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
            let wv = self.inner(&w, v) / rho;
            return Ok((1.0 - wv * wv) / rho);
        }
        let r = self.radius();
        let r2 = r * r;
        if self.curvature < 0.0 {
            // cosh(rho(t)/R) = A cosh(t/R) + B sinh(t/R)
            let a = (rho / r).cosh();
            let b = -self.inner(p, v) / r;
            let (c, c1, c2) = (a, b / r, a / r2);
            let s2 = c * c - 1.0;
            Ok(r * (c2 / s2.sqrt() - c * c1 * c1 / s2.powf(1.5)))
        } else {
            // cos(rho(t)/R) = A cos(t/R) + B sin(t/R)
            let a = (rho / r).cos();
            let b = self.inner(p, v) / r;
            let (c, c1, c2) = (a, b / r, -a / r2);
            let s2 = 1.0 - c * c;
            Ok(-r * (c2 / s2.sqrt() + c * c1 * c1 / s2.powf(1.5)))
        }
    }

    /// Point at normal coordinates `v` around [`SpaceForm::origin`].
    pub fn exp_origin(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} normal coordinates, got {}",
                self.dim,
                v.len()
            )));
        }
        let s = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if self.curvature == 0.0 {
            return Ok(v.to_vec());
        }
        let r = self.radius();
        if self.curvature > 0.0 && s >= std::f64::consts::PI * r {
            return Err(Error::ChartDomain(format!("normal radius {s} reaches the cut locus")));
        }
        let ratio = if s > 0.0 { self.sn(s) / s } else { 1.0 };
        let mut out = Vec::with_capacity(self.dim + 1);
        out.push(if self.curvature < 0.0 { r * (s / r).cosh() } else { r * (s / r).cos() });
        out.extend(v.iter().map(|c| ratio * c));
        Ok(out)
    }

    /// Orthonormal basis of `T_x N` in model coordinates.
    pub fn tangent_basis(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.model_len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(self.dim);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let mut w = self.project_tangent(x, &e);
            for b in &basis {
                let c = self.inner(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
            let nn = self.inner(&w, &w);
            if nn > 1e-10 {
                let s = nn.sqrt();
                basis.push(w.into_iter().map(|c| c / s).collect());
            }
            if basis.len() == self.dim {
                break;
            }
        }
        basis
    }

    /// Metric of normal coordinates around the origin of a 2D space form,
    /// `dr^2 + sn(r)^2 dtheta^2` written in Cartesian chart coordinates.
    pub fn normal_coordinate_metric(&self, x: [f64; 2]) -> crate::geometry::Metric2 {
        let q = x[0] * x[0] + x[1] * x[1];
        let k = self.curvature;
        // a = (sn(s)/s)^2, c = (1 - a)/s^2
        let (a, c) = if (k * q).abs() < 1e-3 {
            let kq = k * q;
            let a = 1.0 - kq / 3.0 + 2.0 * kq * kq / 45.0 - kq * kq * kq / 315.0;
            let c = k / 3.0 - 2.0 * k * k * q / 45.0 + k * k * k * q * q / 315.0;
            (a, c)
        } else {
            let s = q.sqrt();
            let a = (self.sn(s) / s).powi(2);
            (a, (1.0 - a) / q)
        };
        crate::geometry::Metric2 {
            g11: a + c * x[0] * x[0],
            g12: c * x[0] * x[1],
            g22: a + c * x[1] * x[1],
        }
    }
}

/// Geodesic distance between two points of a space form.
pub fn space_form_distance(n: &SpaceForm, p: &[f64], x: &[f64]) -> Result<f64> {
    n.distance(p, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn distance_examples() {
        let e = SpaceForm::euclidean(3);
        assert_eq!(e.distance(&[0.0, 0.0, 0.0], &[3.0, 4.0, 0.0]).unwrap(), 5.0);

        let h = SpaceForm::hyperbolic(3);
        let o = h.origin();
        let x = [2f64.cosh(), 2f64.sinh(), 0.0, 0.0];
        assert!((h.distance(&o, &x).unwrap() - 2.0).abs() < 1e-14);

        let s = SpaceForm::sphere(2);
        let a = [1.0, 0.0, 0.0];
        let b = [(PI / 3.0).cos(), (PI / 3.0).sin(), 0.0];
        assert!((s.distance(&a, &b).unwrap() - PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn distance_rejects_off_model_points() {
        let h = SpaceForm::hyperbolic(2);
        assert!(h.distance(&h.origin(), &[1.0, 1.0, 0.0]).is_err());
        assert!(h.distance(&h.origin(), &[-1.0, 0.0, 0.0]).is_err());
        assert!(h.distance(&h.origin(), &[1.0, 0.0]).is_err());
        let s = SpaceForm::sphere(2);
        assert!(s.distance(&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn scaled_curvature_distances() {
        let h = SpaceForm::new(2, -4.0).unwrap();
        let x = h.exp_origin(&[0.3, 0.4]).unwrap();
        assert!((h.distance(&h.origin(), &x).unwrap() - 0.5).abs() < 1e-14);
        let s = SpaceForm::new(2, 4.0).unwrap();
        let x = s.exp_origin(&[0.3, 0.4]).unwrap();
        assert!((s.distance(&s.origin(), &x).unwrap() - 0.5).abs() < 1e-14);
        assert!(s.exp_origin(&[PI / 2.0, 0.0]).is_err());
    }

    #[test]
    fn geodesic_hessian_matches_model_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in [-1.0, 0.0, 1.0, -2.5] {
            let n = SpaceForm::new(3, k).unwrap();
            for _ in 0..50 {
                let rho: f64 = rng.gen_range(0.1..1.4);
                let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let len = dir.iter().map(|c: &f64| c * c).sum::<f64>().sqrt();
                let v: Vec<f64> = dir.iter().map(|c| rho * c / len).collect();
                let x = n.exp_origin(&v).unwrap();
                let p = n.origin();
                let grad = n.distance_gradient(&p, &x).unwrap();
                for b in n.tangent_basis(&x) {
                    let c = n.inner(&b, &grad);
                    let mut w: Vec<f64> = b.iter().zip(&grad).map(|(bi, gi)| bi - c * gi).collect();
                    let nn = n.inner(&w, &w).sqrt();
                    if !(nn >= 1e-3) {
                        continue;
                    }
                    w.iter_mut().for_each(|c| *c /= nn);
                    let hess = n.geodesic_second_derivative(&p, &x, &w).unwrap();
                    let mu = n.distance_hessian_factor(rho);
                    assert!((hess - mu).abs() < 1e-10 * mu.abs().max(1.0), "K={k}: {hess} vs {mu}");
                }
                let radial = n.geodesic_second_derivative(&p, &x, &grad).unwrap();
                assert!(radial.abs() < 1e-8, "radial Hessian {radial}");
            }
        }
    }

    #[test]
    fn normal_metric_series_matches_closed_form() {
        for k in [-1.0, 1.0, -0.3] {
            let n = SpaceForm::new(2, k).unwrap();
            for s in [0.0305, 0.0317] {
                let x = [s * 0.6, s * 0.8];
                let g = n.normal_coordinate_metric(x);
                let a = (n.sn(s) / s).powi(2);
                let c = (1.0 - a) / (s * s);
                assert!((g.g11 - (a + c * x[0] * x[0])).abs() < 1e-12);
                assert!((g.g12 - c * x[0] * x[1]).abs() < 1e-12);
            }
            let g0 = n.normal_coordinate_metric([0.0, 0.0]);
            assert_eq!((g0.g11, g0.g12, g0.g22), (1.0, 0.0, 1.0));
        }
    }
}
