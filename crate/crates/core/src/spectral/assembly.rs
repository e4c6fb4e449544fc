use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::RiemannianMesh;
use crate::spectral::SparseSymmetricOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AssemblyOptions {
    /// Row-sum lumped mass instead of the consistent one. Diagnostics only:
    /// lumping gives up the Rayleigh-Ritz overestimate.
    pub lumped_mass: bool,
    /// Compute element matrices on one thread. Output is bitwise identical
    /// either way, because accumulation always runs serially in element order.
    pub serial: bool,
}

type Local = Vec<(usize, usize, f64, f64)>;

fn element_matrices(mesh: &RiemannianMesh, e: usize, lumped: bool) -> Result<Local> {
    let geo = mesh.element_geometry(e)?;
    let nodes = mesh.elements().nodes(e);
    let k = geo.nodes;
    let g = geo.inv_metric;
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for a in 0..k {
        for b in a..k {
            let (ga, gb) = (geo.grads[a], geo.grads[b]);
            let stiff = if k == 2 {
                geo.volume * g.g11 * ga[0] * gb[0]
            } else {
                geo.volume * (ga[0] * (g.g11 * gb[0] + g.g12 * gb[1]) + ga[1] * (g.g12 * gb[0] + g.g22 * gb[1]))
            };
            let mass = if lumped {
                if a == b { geo.volume / k as f64 } else { 0.0 }
            } else {
                // Exact integral of products of linear basis functions.
                let denom = ((k + 1) * k) as f64;
                geo.volume * if a == b { 2.0 } else { 1.0 } / denom
            };
            let (i, j) = (nodes[a].min(nodes[b]), nodes[a].max(nodes[b]));
            out.push((i, j, stiff, mass));
        }
    }
    Ok(out)
}

/// P1 stiffness and mass forms with the element-constant metric.
pub fn assemble(mesh: &RiemannianMesh) -> Result<(SparseSymmetricOperator, SparseSymmetricOperator)> {
    assemble_with(mesh, AssemblyOptions::default())
}

pub fn assemble_with(
    mesh: &RiemannianMesh,
    opts: AssemblyOptions,
) -> Result<(SparseSymmetricOperator, SparseSymmetricOperator)> {
    let ne = mesh.n_elements();
    let locals: Vec<Local> = if opts.serial {
        (0..ne).map(|e| element_matrices(mesh, e, opts.lumped_mass)).collect::<Result<_>>()?
    } else {
        (0..ne).into_par_iter().map(|e| element_matrices(mesh, e, opts.lumped_mass)).collect::<Result<_>>()?
    };
    let cap: usize = locals.iter().map(Vec::len).sum();
    let mut stiff = Vec::with_capacity(cap);
    let mut mass = Vec::with_capacity(cap);
    for local in locals {
        for (i, j, s, m) in local {
            stiff.push((i, j, s));
            if m != 0.0 {
                mass.push((i, j, m));
            }
        }
    }
    let n = mesh.n_vertices();
    Ok((
        SparseSymmetricOperator::from_upper_triplets(n, stiff)?,
        SparseSymmetricOperator::from_upper_triplets(n, mass)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_ball_mesh, interval_mesh, SpaceForm};

    #[test]
    fn two_element_interval() {
        let mesh = interval_mesh(1.0, 2).unwrap();
        let (a, b) = assemble(&mesh).unwrap();
        assert_eq!(a.get(1, 1), 4.0);
        assert!((b.get(1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((a.get(1, 1) / b.get(1, 1) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn constants_and_volume() {
        let mesh = geodesic_ball_mesh(&SpaceForm::hyperbolic(2), 1.2, 30).unwrap();
        let (a, b) = assemble(&mesh).unwrap();
        let ones = vec![1.0; mesh.n_vertices()];
        assert!(a.quadratic_form(&ones).abs() < 1e-10);
        let c = vec![1.7; mesh.n_vertices()];
        let vol = mesh.volume().unwrap();
        assert!((b.quadratic_form(&c) - 1.7 * 1.7 * vol).abs() < 1e-10 * vol);
        assert!((b.entry_sum() - vol).abs() < 1e-10 * vol);
        let row_sums = a.apply(&ones);
        assert!(row_sums.iter().all(|s| s.abs() < 1e-10));
    }

    #[test]
    fn unit_disk_mass_sum() {
        let mesh = geodesic_ball_mesh(&SpaceForm::euclidean(2), 1.0, 200).unwrap();
        let (_, b) = assemble(&mesh).unwrap();
        assert!((b.entry_sum() - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn parallel_matches_serial_bitwise() {
        let mesh = geodesic_ball_mesh(&SpaceForm::sphere(2), 1.0, 40).unwrap();
        let par = assemble(&mesh).unwrap();
        let ser = assemble_with(&mesh, AssemblyOptions { serial: true, ..Default::default() }).unwrap();
        assert_eq!(par, ser);
        let lumped = assemble_with(&mesh, AssemblyOptions { lumped_mass: true, ..Default::default() }).unwrap();
        assert!((lumped.1.entry_sum() - par.1.entry_sum()).abs() < 1e-12);
    }
}
