//! Reference values computed without the finite element machinery.

use crate::error::{Error, Result};

/// `J_0(x)` from its power series; accurate for `|x| <= 10`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First positive zero of `J_0`, by bisection on `[2, 3]`.
pub fn first_bessel_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `lambda_1` of the Euclidean unit disk, `j_{0,1}^2`.
pub fn unit_disk_eigenvalue() -> f64 {
    first_bessel_zero().powi(2)
}

/// First Dirichlet eigenvalue of the geodesic disk of radius `r` in the
/// 2D space form of curvature `curvature`, by shooting on the radial
/// equation `u'' + (sn'/sn) u' + lambda u = 0` with RK4 and bisection on
/// the first-zero count.
pub fn radial_disk_eigenvalue(curvature: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("disk radius must be positive, got {r}")));
    }
    if curvature > 0.0 && r >= std::f64::consts::PI / curvature.sqrt() {
        return Err(Error::Domain(format!("radius {r} reaches the cut locus")));
    }
    let k = curvature;
    // sn'/sn
    let log_derivative = move |s: f64| -> f64 {
        if k < 0.0 {
            let a = (-k).sqrt();
            a / (a * s).tanh()
        } else if k > 0.0 {
            let a = k.sqrt();
            a / (a * s).tan()
        } else {
            1.0 / s
        }
    };
    let steps = 4_000usize;
    let has_zero = |lambda: f64| -> bool {
        let s0 = r * 1e-6;
        // u = 1 - lambda s^2/4 + O(s^4), u' = -lambda s/2 + O(s^3).
        let (mut s, mut u, mut du) = (s0, 1.0 - lambda * s0 * s0 / 4.0, -lambda * s0 / 2.0);
        let h = (r - s0) / steps as f64;
        let f = |s: f64, u: f64, du: f64| (du, -log_derivative(s) * du - lambda * u);
        for _ in 0..steps {
            let (k1u, k1v) = f(s, u, du);
            let (k2u, k2v) = f(s + h / 2.0, u + h / 2.0 * k1u, du + h / 2.0 * k1v);
            let (k3u, k3v) = f(s + h / 2.0, u + h / 2.0 * k2u, du + h / 2.0 * k2v);
            let (k4u, k4v) = f(s + h, u + h * k3u, du + h * k3v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            s += h;
            if u <= 0.0 {
                return true;
            }
        }
        false
    };
    let mut hi = 1.0;
    while !has_zero(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Domain("shooting failed to bracket the eigenvalue".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if has_zero(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Area of the geodesic disk of radius `r` in the 2D space form of curvature `curvature`.
pub fn disk_area(curvature: f64, r: f64) -> f64 {
    use std::f64::consts::PI;
    if curvature < 0.0 {
        let a = (-curvature).sqrt();
        2.0 * PI * ((a * r).cosh() - 1.0) / (a * a)
    } else if curvature > 0.0 {
        let a = curvature.sqrt();
        2.0 * PI * (1.0 - (a * r).cos()) / (a * a)
    } else {
        PI * r * r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_zero() {
        assert!((first_bessel_zero() - 2.404_825_557_695_773).abs() < 1e-14);
        assert!((unit_disk_eigenvalue() - 5.783_185_962_946_784).abs() < 1e-12);
    }

    #[test]
    fn shooting_matches_independent_values() {
        // Euclidean disk and hemisphere have closed forms.
        assert!((radial_disk_eigenvalue(0.0, 1.0).unwrap() - 5.783_185_962_946_784).abs() < 1e-6);
        let hemi = radial_disk_eigenvalue(1.0, std::f64::consts::FRAC_PI_2 - 1e-12).unwrap();
        assert!((hemi - 2.0).abs() < 1e-6);
        // Frozen high-precision values for hyperbolic disks.
        for (r, lam) in [(2.0, 1.767_253_090_3), (4.0, 0.663_319_626_5), (6.0, 0.447_622_822_1)] {
            let v = radial_disk_eigenvalue(-1.0, r).unwrap();
            assert!((v - lam).abs() < 1e-7, "r={r}: {v}");
        }
        let cap = radial_disk_eigenvalue(1.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((cap - 9.0397).abs() < 1e-3, "{cap}");
    }

    #[test]
    fn areas() {
        assert!((disk_area(-1.0, 2.0) - 17.355_387_38).abs() < 1e-7);
        assert!((disk_area(1.0, std::f64::consts::FRAC_PI_2) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
