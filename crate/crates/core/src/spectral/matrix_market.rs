//! Matrix Market coordinate format, `real symmetric`, lower triangle, 1-based.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::spectral::SparseSymmetricOperator;

pub fn to_matrix_market(op: &SparseSymmetricOperator) -> String {
    let entries = op.upper_triplets();
    let mut s = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(s, "{} {} {}", op.dim(), op.dim(), entries.len());
    // Upper (i, j) is stored as lower (j, i).
    let mut lower: Vec<(usize, usize, f64)> = entries.into_iter().map(|(i, j, v)| (j, i, v)).collect();
    lower.sort_by_key(|&(i, j, _)| (j, i));
    for (i, j, v) in lower {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
    }
    s
}

pub fn from_matrix_market(text: &str) -> Result<SparseSymmetricOperator> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty Matrix Market input".into()))?;
    let h = header.to_ascii_lowercase();
    if !h.starts_with("%%matrixmarket") || !h.contains("coordinate") || !h.contains("symmetric") {
        return Err(Error::Parse(format!("unsupported Matrix Market header `{header}`")));
    }
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size: Vec<usize> = body
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size `{t}`"))))
        .collect::<Result<_>>()?;
    if size.len() != 3 || size[0] != size[1] {
        return Err(Error::Parse("size line must be `n n nnz` for a square matrix".into()));
    }
    let (n, nnz) = (size[0], size[2]);
    let mut triplets = Vec::with_capacity(nnz);
    for k in 0..nnz {
        let line = body.next().ok_or_else(|| Error::Parse(format!("missing entry {k}")))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::Parse(format!("entry {k} must have three fields")));
        }
        let i: usize = t[0].parse().map_err(|_| Error::Parse(format!("bad row `{}`", t[0])))?;
        let j: usize = t[1].parse().map_err(|_| Error::Parse(format!("bad column `{}`", t[1])))?;
        let v: f64 = t[2].parse().map_err(|_| Error::Parse(format!("bad value `{}`", t[2])))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::Parse(format!("entry {k} index out of range")));
        }
        triplets.push(((i - 1).min(j - 1), (i - 1).max(j - 1), v));
    }
    SparseSymmetricOperator::from_upper_triplets(n, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_ball_mesh, SpaceForm};
    use crate::spectral::assemble;

    #[test]
    fn round_trip() {
        let mesh = geodesic_ball_mesh(&SpaceForm::hyperbolic(2), 1.0, 6).unwrap();
        let (a, b) = assemble(&mesh).unwrap();
        for op in [a, b] {
            let text = to_matrix_market(&op);
            assert!(text.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
            assert_eq!(from_matrix_market(&text).unwrap(), op);
        }
    }

    #[test]
    fn rejects_general_matrices() {
        assert!(from_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n").is_err());
        assert!(from_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n").is_err());
    }
}
