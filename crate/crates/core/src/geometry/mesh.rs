//! Simplicial meshes of chart domains carrying an element-wise constant metric.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpaceForm;

/// Symmetric 2x2 metric tensor. One-dimensional meshes only use `g11`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric2 {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl Metric2 {
    pub const IDENTITY: Metric2 = Metric2 { g11: 1.0, g12: 0.0, g22: 1.0 };

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn inverse(&self) -> Option<Metric2> {
        let d = self.det();
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        Some(Metric2 { g11: self.g22 / d, g12: -self.g12 / d, g22: self.g11 / d })
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.g11 * v[0] + self.g12 * v[1], self.g12 * v[0] + self.g22 * v[1]]
    }

    pub fn quad(&self, v: [f64; 2]) -> f64 {
        let w = self.apply(v);
        v[0] * w[0] + v[1] * w[1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Elements {
    Segments(Vec<[usize; 2]>),
    Triangles(Vec<[usize; 3]>),
}

impl Elements {
    pub fn len(&self) -> usize {
        match self {
            Elements::Segments(s) => s.len(),
            Elements::Triangles(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Elements::Segments(_) => 1,
            Elements::Triangles(_) => 2,
        }
    }

    /// Vertex indices of element `e`.
    pub fn nodes(&self, e: usize) -> &[usize] {
        match self {
            Elements::Segments(s) => &s[e],
            Elements::Triangles(t) => &t[e],
        }
    }
}

/// Per-element geometric quantities needed by assembly and the field operators.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    /// Metric volume (length or area).
    pub volume: f64,
    /// Chart gradients of the barycentric coordinates (`[x, 0]` in 1D).
    pub grads: [[f64; 2]; 3],
    pub inv_metric: Metric2,
    pub nodes: usize,
}

/// A simplicial mesh of a chart domain with a constant metric per element.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannianMesh {
    vertices: Vec<[f64; 2]>,
    elements: Elements,
    metrics: Vec<Metric2>,
    boundary: Vec<usize>,
}

impl RiemannianMesh {
    /// Builds and validates a mesh. Boundary indices are sorted and deduplicated.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        elements: Elements,
        metrics: Vec<Metric2>,
        boundary: Vec<usize>,
    ) -> Result<Self> {
        let boundary: Vec<usize> = boundary.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mesh = RiemannianMesh { vertices, elements, metrics, boundary };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Builds a mesh whose element metric is `metric` evaluated at the chart
    /// barycenter of each element.
    pub fn with_metric_fn<F>(
        vertices: Vec<[f64; 2]>,
        elements: Elements,
        boundary: Vec<usize>,
        metric: F,
    ) -> Result<Self>
    where
        F: Fn([f64; 2]) -> Metric2,
    {
        let metrics = (0..elements.len())
            .map(|e| metric(barycenter(&vertices, elements.nodes(e))))
            .collect();
        Self::new(vertices, elements, metrics, boundary)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn elements(&self) -> &Elements {
        &self.elements
    }

    pub fn metrics(&self) -> &[Metric2] {
        &self.metrics
    }

    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements.dim()
    }

    pub fn is_boundary(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for &b in &self.boundary {
            flags[b] = true;
        }
        flags
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        let flags = self.is_boundary();
        (0..self.vertices.len()).filter(|&i| !flags[i]).collect()
    }

    pub fn element_barycenter(&self, e: usize) -> [f64; 2] {
        barycenter(&self.vertices, self.elements.nodes(e))
    }

    pub fn element_geometry(&self, e: usize) -> Result<ElementGeometry> {
        let nodes = self.elements.nodes(e);
        let g = self.metrics[e];
        match self.elements {
            Elements::Segments(_) => {
                let len = self.vertices[nodes[1]][0] - self.vertices[nodes[0]][0];
                if !(len.abs() > 0.0) || !(g.g11 > 0.0) {
                    return Err(Error::DegenerateElement(e));
                }
                Ok(ElementGeometry {
                    volume: len.abs() * g.g11.sqrt(),
                    grads: [[-1.0 / len, 0.0], [1.0 / len, 0.0], [0.0, 0.0]],
                    inv_metric: Metric2 { g11: 1.0 / g.g11, g12: 0.0, g22: 0.0 },
                    nodes: 2,
                })
            }
            Elements::Triangles(_) => {
                let [a, b, c] = [self.vertices[nodes[0]], self.vertices[nodes[1]], self.vertices[nodes[2]]];
                let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
                let det = e1[0] * e2[1] - e1[1] * e2[0];
                let inv = g.inverse().ok_or(Error::DegenerateElement(e))?;
                if !(det.abs() > 0.0) || !det.is_finite() {
                    return Err(Error::DegenerateElement(e));
                }
                // Rows of J^{-T} are the gradients of lambda_1 and lambda_2.
                let g1 = [e2[1] / det, -e2[0] / det];
                let g2 = [-e1[1] / det, e1[0] / det];
                let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
                Ok(ElementGeometry {
                    volume: 0.5 * det.abs() * g.det().sqrt(),
                    grads: [g0, g1, g2],
                    inv_metric: inv,
                    nodes: 3,
                })
            }
        }
    }

    /// Total metric volume.
    pub fn volume(&self) -> Result<f64> {
        (0..self.n_elements()).map(|e| self.element_geometry(e).map(|g| g.volume)).sum()
    }

    /// Largest metric edge length.
    pub fn mesh_size(&self) -> f64 {
        let mut h: f64 = 0.0;
        for e in 0..self.n_elements() {
            let nodes = self.elements.nodes(e);
            let g = self.metrics[e];
            for i in 0..nodes.len() {
                for j in (i + 1)..nodes.len() {
                    let (a, b) = (self.vertices[nodes[i]], self.vertices[nodes[j]]);
                    let d = [b[0] - a[0], b[1] - a[1]];
                    let len2 = if self.dim() == 1 { g.g11 * d[0] * d[0] } else { g.quad(d) };
                    h = h.max(len2.sqrt());
                }
            }
        }
        h
    }

    fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if nv == 0 || self.elements.is_empty() {
            return Err(Error::InvalidMesh("mesh has no vertices or no elements".into()));
        }
        if self.metrics.len() != self.elements.len() {
            return Err(Error::InvalidMesh(format!(
                "{} metrics for {} elements",
                self.metrics.len(),
                self.elements.len()
            )));
        }
        if self.vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        for e in 0..self.elements.len() {
            let nodes = self.elements.nodes(e);
            if let Some(&bad) = nodes.iter().find(|&&i| i >= nv) {
                return Err(Error::InvalidMesh(format!("element {e} references vertex {bad} of {nv}")));
            }
            let geo = self.element_geometry(e).map_err(|_| {
                Error::InvalidMesh(format!("element {e} has nonpositive metric volume"))
            })?;
            if !(geo.volume > 0.0) || !geo.volume.is_finite() {
                return Err(Error::InvalidMesh(format!("element {e} has nonpositive metric volume")));
            }
        }
        if let Some(&bad) = self.boundary.iter().find(|&&b| b >= nv) {
            return Err(Error::InvalidMesh(format!("boundary vertex {bad} out of range")));
        }
        // Union-find over element connectivity.
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut used = vec![false; nv];
        for e in 0..self.elements.len() {
            let nodes = self.elements.nodes(e);
            for &n in nodes {
                used[n] = true;
            }
            for w in nodes.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {i} belongs to no element")));
        }
        let root = find(&mut parent, 0);
        if (1..nv).any(|i| find(&mut parent, i) != root) {
            return Err(Error::InvalidMesh("mesh is not connected".into()));
        }
        Ok(())
    }
}

fn barycenter(vertices: &[[f64; 2]], nodes: &[usize]) -> [f64; 2] {
    let k = nodes.len() as f64;
    let mut c = [0.0, 0.0];
    for &n in nodes {
        c[0] += vertices[n][0];
        c[1] += vertices[n][1];
    }
    [c[0] / k, c[1] / k]
}

/// `[0, length]` split into `n` equal segments, Dirichlet at both ends.
pub fn interval_mesh(length: f64, n: usize) -> Result<RiemannianMesh> {
    if n < 1 || !(length > 0.0) {
        return Err(Error::InvalidArgument(format!("interval needs n >= 1 and length > 0 (n = {n}, length = {length})")));
    }
    let vertices = (0..=n).map(|i| [length * i as f64 / n as f64, 0.0]).collect();
    let segs = (0..n).map(|i| [i, i + 1]).collect();
    RiemannianMesh::new(
        vertices,
        Elements::Segments(segs),
        vec![Metric2::IDENTITY; n],
        vec![0, n],
    )
}

/// Structured triangulation of the rectangle `[u0, u1] x [v0, v1]` with
/// `nu x nv` cells, each split along its main diagonal.
pub(crate) fn grid_triangulation(
    u: (f64, f64),
    v: (f64, f64),
    nu: usize,
    nv: usize,
) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let mut verts = Vec::with_capacity((nu + 1) * (nv + 1));
    for j in 0..=nv {
        for i in 0..=nu {
            verts.push([
                u.0 + (u.1 - u.0) * i as f64 / nu as f64,
                v.0 + (v.1 - v.0) * j as f64 / nv as f64,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nu + 1) + i;
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (verts, tris)
}

/// Euclidean square `[0, side]^2` with `n x n` cells.
pub fn square_mesh(side: f64, n: usize) -> Result<RiemannianMesh> {
    if n < 2 || !(side > 0.0) {
        return Err(Error::InvalidArgument(format!("square needs n >= 2 and side > 0 (n = {n})")));
    }
    let (verts, tris) = grid_triangulation((0.0, side), (0.0, side), n, n);
    let boundary = (0..verts.len())
        .filter(|&k| {
            let (i, j) = (k % (n + 1), k / (n + 1));
            i == 0 || j == 0 || i == n || j == n
        })
        .collect();
    let m = tris.len();
    RiemannianMesh::new(verts, Elements::Triangles(tris), vec![Metric2::IDENTITY; m], boundary)
}

/// Concentric-ring triangulation of the chart disk of radius `radius`:
/// a center vertex and `rings` rings, ring `i` carrying `6 i` vertices.
/// Returns the vertices, triangles and the outer-ring indices.
pub(crate) fn ring_disk(radius: f64, rings: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>, Vec<usize>) {
    let mut verts = vec![[0.0, 0.0]];
    let mut start = vec![0usize];
    for i in 1..=rings {
        start.push(verts.len());
        let rad = radius * i as f64 / rings as f64;
        let count = 6 * i;
        for k in 0..count {
            let th = 2.0 * PI * k as f64 / count as f64;
            verts.push([rad * th.cos(), rad * th.sin()]);
        }
    }
    let mut tris = Vec::with_capacity(6 * rings * rings);
    for k in 0..6 {
        tris.push([0, start[1] + k, start[1] + (k + 1) % 6]);
    }
    for i in 2..=rings {
        let (inner_n, outer_n) = (6 * (i - 1), 6 * i);
        let (si, so) = (start[i - 1], start[i]);
        // Merge the two rings by angle.
        let (mut a, mut b) = (0usize, 0usize);
        while a < inner_n || b < outer_n {
            let next_inner = (a + 1) as f64 / inner_n as f64;
            let next_outer = (b + 1) as f64 / outer_n as f64;
            if b < outer_n && (a >= inner_n || next_outer <= next_inner) {
                tris.push([si + a % inner_n, so + b, so + (b + 1) % outer_n]);
                b += 1;
            } else {
                tris.push([si + a, so + b % outer_n, si + (a + 1) % inner_n]);
                a += 1;
            }
        }
    }
    let outer: Vec<usize> = (start[rings]..verts.len()).collect();
    (verts, tris, outer)
}

/// Geodesic ball of radius `r` around the origin of a 2D space form, meshed
/// in normal coordinates with `resolution` rings. The metric is
/// `dr^2 + sn_K(r)^2 dtheta^2` written in Cartesian chart coordinates.
pub fn geodesic_ball_mesh(n2: &SpaceForm, r: f64, resolution: usize) -> Result<RiemannianMesh> {
    if n2.dim != 2 {
        return Err(Error::InvalidArgument(format!("geodesic balls need a 2D space form, got dim {}", n2.dim)));
    }
    if !(r > 0.0 && r.is_finite()) || resolution < 1 {
        return Err(Error::InvalidArgument(format!("need r > 0 and resolution >= 1 (r = {r})")));
    }
    if n2.curvature > 0.0 && r >= n2.injectivity_radius() {
        return Err(Error::Domain(format!(
            "radius {r} must stay below pi/sqrt(K) = {}",
            n2.injectivity_radius()
        )));
    }
    let (verts, tris, outer) = ring_disk(r, resolution);
    let form = *n2;
    RiemannianMesh::with_metric_fn(verts, Elements::Triangles(tris), outer, move |x| {
        form.normal_coordinate_metric(x)
    })
}
