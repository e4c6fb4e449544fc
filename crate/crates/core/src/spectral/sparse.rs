use crate::error::{Error, Result};

/// Symmetric sparse matrix stored as full CSR (both triangles) so products
/// are a single pass. Built only from symmetric data.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricOperator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetricOperator {
    /// Builds from upper-triangle triplets `(row, col, value)` with
    /// `row <= col`; duplicates are summed in input order.
    pub fn from_upper_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, v) in &triplets {
            if i > j || j >= n {
                return Err(Error::InvalidArgument(format!("triplet ({i}, {j}) is not upper-triangular in dimension {n}")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite entry at ({i}, {j})")));
            }
        }
        // Stable sort keeps the summation order of duplicates fixed.
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut counts = vec![0usize; n];
        for &(i, j, _) in &merged {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let nnz = row_ptr[n];
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut fill = row_ptr.clone();
        // Lower entries of row j come from rows i < j, which are visited in
        // increasing order, so every row ends up sorted by column.
        for &(i, j, v) in &merged {
            if i != j {
                cols[fill[j]] = i;
                vals[fill[j]] = v;
                fill[j] += 1;
            }
        }
        for &(i, j, v) in &merged {
            cols[fill[i]] = j;
            vals[fill[i]] = v;
            fill[i] += 1;
        }
        Ok(SparseSymmetricOperator { n, row_ptr, cols, vals })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn upper_triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n).flat_map(|i| self.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v))).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply(x))
    }

    /// Sum of all entries, `1^T M 1`.
    pub fn entry_sum(&self) -> f64 {
        self.vals.iter().sum()
    }

    /// Principal submatrix on `keep` (sorted, distinct indices).
    pub fn restrict(&self, keep: &[usize]) -> SparseSymmetricOperator {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for &old in keep {
            for (j, v) in self.row(old) {
                if map[j] != usize::MAX {
                    cols.push(map[j]);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSymmetricOperator { n: keep.len(), row_ptr, cols, vals }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_symmetric_csr() {
        let m = SparseSymmetricOperator::from_upper_triplets(
            3,
            vec![(0, 0, 2.0), (0, 1, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 2, 2.0), (0, 1, 0.5)],
        )
        .unwrap();
        assert_eq!(m.get(1, 0), -0.5);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.apply(&[1.0, 1.0, 1.0]), vec![1.5, 0.5, 1.0]);
        assert_eq!(m.upper_triplets().len(), 5);
        let r = m.restrict(&[0, 2]);
        assert_eq!(r.dim(), 2);
        assert_eq!(r.get(1, 1), 2.0);
        assert_eq!(r.get(0, 1), 0.0);
        assert!(SparseSymmetricOperator::from_upper_triplets(2, vec![(1, 0, 1.0)]).is_err());
    }
}
