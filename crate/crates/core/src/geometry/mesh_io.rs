//! OFF text plus a JSON sidecar for metrics and boundary flags.
//!
//! Segment meshes use 2-vertex faces. Coordinates are written in shortest
//! round-trip form, so a write/read cycle reproduces the mesh bit for bit.
//! Without a sidecar, triangles get the identity metric and the boundary is
//! the set of vertices on edges owned by a single triangle.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Elements, Metric2, RiemannianMesh};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub dimension: usize,
    pub metrics: Vec<[f64; 3]>,
    pub boundary_vertices: Vec<usize>,
}

/// `mesh.off` -> `mesh.json`.
pub fn sidecar_path(off: &Path) -> PathBuf {
    off.with_extension("json")
}

pub fn to_off_string(mesh: &RiemannianMesh) -> String {
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} 0", mesh.n_vertices(), mesh.n_elements());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{} {} 0", v[0], v[1]);
    }
    for e in 0..mesh.n_elements() {
        let nodes = mesh.elements().nodes(e);
        let _ = write!(s, "{}", nodes.len());
        for n in nodes {
            let _ = write!(s, " {n}");
        }
        s.push('\n');
    }
    s
}

pub fn sidecar(mesh: &RiemannianMesh) -> Sidecar {
    Sidecar {
        dimension: mesh.dim(),
        metrics: mesh.metrics().iter().map(|g| [g.g11, g.g12, g.g22]).collect(),
        boundary_vertices: mesh.boundary_vertices().to_vec(),
    }
}

/// Parses OFF text; `side` supplies metrics and boundary when present.
pub fn from_off_str(off: &str, side: Option<&Sidecar>) -> Result<RiemannianMesh> {
    let mut lines = off
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty OFF file".into()))?;
    if header != "OFF" {
        return Err(Error::Parse(format!("expected `OFF` header, found `{header}`")));
    }
    let counts = parse_numbers::<usize>(lines.next().ok_or_else(|| Error::Parse("missing counts line".into()))?)?;
    if counts.len() < 2 {
        return Err(Error::Parse("counts line needs vertex and face counts".into()));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("missing vertex {i}")))?;
        let c = parse_numbers::<f64>(line)?;
        if c.len() < 2 {
            return Err(Error::Parse(format!("vertex {i} needs at least two coordinates")));
        }
        vertices.push([c[0], c[1]]);
    }
    let mut segs = Vec::new();
    let mut tris = Vec::new();
    for f in 0..nf {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("missing face {f}")))?;
        let c = parse_numbers::<usize>(line)?;
        match c.as_slice() {
            [2, a, b, ..] => segs.push([*a, *b]),
            [3, a, b, d, ..] => tris.push([*a, *b, *d]),
            _ => return Err(Error::Parse(format!("face {f} must have 2 or 3 vertices"))),
        }
    }
    if !segs.is_empty() && !tris.is_empty() {
        return Err(Error::Parse("mixed segment and triangle faces".into()));
    }
    let elements = if segs.is_empty() { Elements::Triangles(tris) } else { Elements::Segments(segs) };

    let (metrics, boundary) = match side {
        Some(s) => {
            if s.dimension != elements.dim() {
                return Err(Error::Parse(format!(
                    "sidecar dimension {} does not match {}D elements",
                    s.dimension,
                    elements.dim()
                )));
            }
            let m = s.metrics.iter().map(|g| Metric2 { g11: g[0], g12: g[1], g22: g[2] }).collect();
            (m, s.boundary_vertices.clone())
        }
        None => (vec![Metric2::IDENTITY; elements.len()], topological_boundary(&elements)),
    };
    RiemannianMesh::new(vertices, elements, metrics, boundary)
}

fn parse_numbers<T: std::str::FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::Parse(format!("bad number `{t}`"))))
        .collect()
}

fn topological_boundary(elements: &Elements) -> Vec<usize> {
    let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for e in 0..elements.len() {
        let nodes = elements.nodes(e);
        let k = nodes.len();
        for i in 0..k {
            let mut facet: Vec<usize> = (0..k).filter(|&j| j != i).map(|j| nodes[j]).collect();
            facet.sort_unstable();
            *count.entry(facet).or_default() += 1;
        }
    }
    count.into_iter().filter(|(_, c)| *c == 1).flat_map(|(f, _)| f).collect()
}

/// Writes `path` and its sidecar.
pub fn write_mesh(mesh: &RiemannianMesh, path: &Path) -> Result<()> {
    std::fs::write(path, to_off_string(mesh))?;
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar(mesh))?)?;
    Ok(())
}

/// Reads `path`, using the sidecar when it exists.
pub fn read_mesh(path: &Path) -> Result<RiemannianMesh> {
    let off = std::fs::read_to_string(path)?;
    let side_path = sidecar_path(path);
    let side = if side_path.exists() {
        Some(serde_json::from_str::<Sidecar>(&std::fs::read_to_string(side_path)?)?)
    } else {
        None
    };
    from_off_str(&off, side.as_ref())
}
