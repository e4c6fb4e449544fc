//! Preconditioned conjugate gradients.

use crate::error::{Error, Result};
use crate::spectral::sparse::dot;
use crate::spectral::SparseSymmetricOperator;

/// Incomplete Cholesky with zero fill, or Jacobi when the factorization
/// breaks down.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Jacobi(Vec<f64>),
    /// Lower factor in CSR; each row ends with its diagonal.
    IncompleteCholesky { row_ptr: Vec<usize>, cols: Vec<usize>, vals: Vec<f64> },
}

impl Preconditioner {
    pub fn jacobi(a: &SparseSymmetricOperator) -> Result<Self> {
        let d = a.diagonal();
        if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::Indefinite(format!("diagonal entry {i} is {}", d[i])));
        }
        Ok(Preconditioner::Jacobi(d.into_iter().map(|x| 1.0 / x).collect()))
    }

    /// IC(0), falling back to Jacobi on a nonpositive pivot.
    pub fn incomplete_cholesky(a: &SparseSymmetricOperator) -> Result<Self> {
        let n = a.dim();
        let mut row_ptr = vec![0usize];
        let mut cols: Vec<usize> = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        for i in 0..n {
            let start = cols.len();
            for (j, v) in a.row(i).filter(|&(j, _)| j <= i) {
                cols.push(j);
                vals.push(v);
            }
            if cols.last() != Some(&i) {
                return Self::jacobi(a);
            }
            let end = cols.len();
            for p in start..end {
                let k = cols[p];
                if k == i {
                    let pivot = vals[p] - vals[start..p].iter().map(|x| x * x).sum::<f64>();
                    if !(pivot > 0.0) || !pivot.is_finite() {
                        return Self::jacobi(a);
                    }
                    vals[p] = pivot.sqrt();
                    continue;
                }
                // Sparse dot of rows i and k over columns < k.
                let (ks, ke) = (row_ptr[k], row_ptr[k + 1]);
                let (mut s, mut q, mut r) = (0.0, start, ks);
                while q < p && r < ke - 1 {
                    match cols[q].cmp(&cols[r]) {
                        std::cmp::Ordering::Less => q += 1,
                        std::cmp::Ordering::Greater => r += 1,
                        std::cmp::Ordering::Equal => {
                            s += vals[q] * vals[r];
                            q += 1;
                            r += 1;
                        }
                    }
                }
                vals[p] = (vals[p] - s) / vals[ke - 1];
            }
            row_ptr.push(cols.len());
        }
        Ok(Preconditioner::IncompleteCholesky { row_ptr, cols, vals })
    }

    pub fn is_incomplete_cholesky(&self) -> bool {
        matches!(self, Preconditioner::IncompleteCholesky { .. })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Jacobi(inv) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv) {
                    *zi = ri * di;
                }
            }
            Preconditioner::IncompleteCholesky { row_ptr, cols, vals } => {
                let n = r.len();
                for i in 0..n {
                    let (s, e) = (row_ptr[i], row_ptr[i + 1]);
                    let mut acc = r[i];
                    for p in s..e - 1 {
                        acc -= vals[p] * z[cols[p]];
                    }
                    z[i] = acc / vals[e - 1];
                }
                for i in (0..n).rev() {
                    let (s, e) = (row_ptr[i], row_ptr[i + 1]);
                    z[i] /= vals[e - 1];
                    let zi = z[i];
                    for p in s..e - 1 {
                        z[cols[p]] -= vals[p] * zi;
                    }
                }
            }
        }
    }
}

/// Solves `A x = b` from the initial guess in `x`, stopping when
/// `|r| <= tol |b|`. Returns the iteration count.
pub fn pcg(
    a: &SparseSymmetricOperator,
    b: &[f64],
    x: &mut [f64],
    precond: &Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = a.dim();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut r = a.apply(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= tol * bnorm {
            return Ok(it);
        }
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Indefinite(format!("p^T A p = {pap} at CG iteration {it}")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rel = dot(&r, &r).sqrt() / bnorm;
    if rel <= tol {
        Ok(max_iter)
    } else {
        Err(Error::LinearSolver(max_iter, rel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSymmetricOperator {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        SparseSymmetricOperator::from_upper_triplets(n, t).unwrap()
    }

    #[test]
    fn ic0_is_exact_for_tridiagonal() {
        let a = laplacian_1d(50);
        let pc = Preconditioner::incomplete_cholesky(&a).unwrap();
        assert!(pc.is_incomplete_cholesky());
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; 50];
        let it = pcg(&a, &b, &mut x, &pc, 1e-12, 100).unwrap();
        assert!(it <= 2, "{it} iterations");
        let ax = a.apply(&x);
        assert!(ax.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-10));
    }

    #[test]
    fn jacobi_converges_and_indefinite_is_detected() {
        let a = laplacian_1d(30);
        let pc = Preconditioner::jacobi(&a).unwrap();
        let b = vec![1.0; 30];
        let mut x = vec![0.0; 30];
        pcg(&a, &b, &mut x, &pc, 1e-10, 200).unwrap();
        let neg = SparseSymmetricOperator::from_upper_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)]).unwrap();
        let pc = Preconditioner::incomplete_cholesky(&neg).unwrap();
        assert!(!pc.is_incomplete_cholesky());
        let mut x = vec![0.0; 2];
        assert!(matches!(pcg(&neg, &[1.0, -1.0], &mut x, &pc, 1e-10, 10), Err(Error::Indefinite(_))));
    }
}
