//! Meshing a connected component of the preimage of an ambient ball.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::{grid_triangulation, ChartRect, Elements, ParametricImmersion, RiemannianMesh};

/// Pilot grid used to locate the component before the fine pass.
const PILOT: usize = 96;
/// In-vertices closer than this fraction of an edge to the level set are
/// moved onto it, which keeps cut elements away from slivers.
const SNAP: f64 = 0.01;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    In,
    On,
    Out,
}

struct Grid {
    verts: Vec<[f64; 2]>,
    tris: Vec<[usize; 3]>,
    nu: usize,
    nv: usize,
    /// `rho(phi(x)) - r` per vertex.
    level: Vec<f64>,
}

impl Grid {
    fn build(
        imm: &dyn ParametricImmersion,
        p: &[f64],
        r: f64,
        rect: ChartRect,
        nu: usize,
        nv: usize,
    ) -> Result<Grid> {
        let n = imm.ambient();
        let len = n.model_len();
        let (verts, tris) = grid_triangulation(rect.u, rect.v, nu, nv);
        let level = verts
            .iter()
            .map(|&x| imm.point(x).map(|y| n.distance_unchecked(p, &y[..len]) - r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid { verts, tris, nu, nv, level })
    }

    fn on_rim(&self, k: usize) -> [bool; 4] {
        let (i, j) = (k % (self.nu + 1), k / (self.nu + 1));
        [i == 0, i == self.nu, j == 0, j == self.nv]
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.verts.len()];
        for t in &self.tris {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Vertices of the In-component containing the global minimum of the
    /// level function.
    fn component(&self, sides: &[Side], adj: &[Vec<usize>]) -> Result<Vec<bool>> {
        let seed = (0..self.level.len())
            .min_by(|&a, &b| self.level[a].total_cmp(&self.level[b]))
            .expect("grid has vertices");
        if sides[seed] != Side::In {
            return Err(Error::EmptyComponent);
        }
        let mut member = vec![false; self.verts.len()];
        member[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if !member[b] && sides[b] == Side::In {
                    member[b] = true;
                    queue.push_back(b);
                }
            }
        }
        Ok(member)
    }
}

fn classify(level: &[f64]) -> Vec<Side> {
    level
        .iter()
        .map(|&d| {
            if d < 0.0 {
                Side::In
            } else if d == 0.0 {
                Side::On
            } else {
                Side::Out
            }
        })
        .collect()
}

/// Meshes the connected component of `{x : rho(phi(x)) <= r}` that contains
/// the chart minimizer of `rho o phi`, with `p` the ambient center. The
/// component is covered by a grid of `resolution` cells per side; cut cells
/// are clipped against the linearly interpolated level set, whose vertices
/// form the Dirichlet boundary.
pub fn immersed_patch_mesh(
    imm: &dyn ParametricImmersion,
    p: &[f64],
    r: f64,
    resolution: usize,
) -> Result<RiemannianMesh> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {r}")));
    }
    if resolution < 4 {
        return Err(Error::InvalidArgument(format!("patch resolution must be >= 4, got {resolution}")));
    }
    imm.ambient().check_point(p)?;
    let chart = imm.chart();

    // Locate the component on a pilot grid and take its bounding box.
    let pilot = Grid::build(imm, p, r, chart, PILOT, PILOT)?;
    let sides = classify(&pilot.level);
    let member = pilot.component(&sides, &pilot.neighbours())?;
    let (du, dv) = ((chart.u.1 - chart.u.0) / PILOT as f64, (chart.v.1 - chart.v.0) / PILOT as f64);
    let mut bbox = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for (k, _) in member.iter().enumerate().filter(|(_, m)| **m) {
        if pilot.on_rim(k).iter().any(|&b| b) {
            return Err(Error::ComponentTouchesChartBoundary);
        }
        let x = pilot.verts[k];
        bbox = [bbox[0].min(x[0]), bbox[1].max(x[0]), bbox[2].min(x[1]), bbox[3].max(x[1])];
    }
    let mut rect = ChartRect {
        u: ((bbox[0] - 1.5 * du).max(chart.u.0), (bbox[1] + 1.5 * du).min(chart.u.1)),
        v: ((bbox[2] - 1.5 * dv).max(chart.v.0), (bbox[3] + 1.5 * dv).min(chart.v.1)),
    };

    loop {
        let (wu, wv) = (rect.u.1 - rect.u.0, rect.v.1 - rect.v.0);
        let scale = resolution as f64 / wu.max(wv);
        let nu = ((wu * scale).round() as usize).max(2);
        let nv = ((wv * scale).round() as usize).max(2);
        let grid = Grid::build(imm, p, r, rect, nu, nv)?;
        let adj = grid.neighbours();
        let mut level = grid.level.clone();
        snap(&mut level, &adj);
        let sides = classify(&level);
        let member = grid.component(&sides, &adj)?;

        let mut grow = [false; 4];
        for (k, _) in member.iter().enumerate().filter(|(_, m)| **m) {
            for (g, hit) in grow.iter_mut().zip(grid.on_rim(k)) {
                *g |= hit;
            }
        }
        if grow.iter().any(|&g| g) {
            let at_chart = [rect.u.0 <= chart.u.0, rect.u.1 >= chart.u.1, rect.v.0 <= chart.v.0, rect.v.1 >= chart.v.1];
            if grow.iter().zip(at_chart).any(|(&g, c)| g && c) {
                return Err(Error::ComponentTouchesChartBoundary);
            }
            let (pu, pv) = (0.25 * wu, 0.25 * wv);
            if grow[0] {
                rect.u.0 = (rect.u.0 - pu).max(chart.u.0);
            }
            if grow[1] {
                rect.u.1 = (rect.u.1 + pu).min(chart.u.1);
            }
            if grow[2] {
                rect.v.0 = (rect.v.0 - pv).max(chart.v.0);
            }
            if grow[3] {
                rect.v.1 = (rect.v.1 + pv).min(chart.v.1);
            }
            continue;
        }
        return clip(imm, &grid, &level, &sides, &member);
    }
}

/// Moves In-vertices lying within `SNAP` of the level set onto it.
fn snap(level: &mut [f64], adj: &[Vec<usize>]) {
    let original = level.to_vec();
    for a in 0..level.len() {
        let da = original[a];
        if da >= 0.0 {
            continue;
        }
        let near = adj[a].iter().any(|&b| {
            let db = original[b];
            db > 0.0 && da / (da - db) < SNAP
        });
        if near {
            level[a] = 0.0;
        }
    }
}

fn clip(
    imm: &dyn ParametricImmersion,
    grid: &Grid,
    level: &[f64],
    sides: &[Side],
    member: &[bool],
) -> Result<RiemannianMesh> {
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cuts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut verts: Vec<[f64; 2]> = Vec::new();
    let mut boundary: Vec<usize> = Vec::new();
    let mut tris: Vec<[usize; 3]> = Vec::new();

    for t in &grid.tris {
        if !t.iter().any(|&k| member[k]) {
            continue;
        }
        // Sutherland-Hodgman against {level <= 0}.
        let mut poly: Vec<usize> = Vec::with_capacity(4);
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            if sides[a] != Side::Out {
                let id = *index.entry(a).or_insert_with(|| {
                    verts.push(grid.verts[a]);
                    if sides[a] == Side::On {
                        boundary.push(verts.len() - 1);
                    }
                    verts.len() - 1
                });
                poly.push(id);
            }
            let crosses = (sides[a] == Side::In && sides[b] == Side::Out)
                || (sides[a] == Side::Out && sides[b] == Side::In);
            if crosses {
                let (i, o) = if sides[a] == Side::In { (a, b) } else { (b, a) };
                let id = *cuts.entry((i.min(o), i.max(o))).or_insert_with(|| {
                    let s = level[i] / (level[i] - level[o]);
                    let (xi, xo) = (grid.verts[i], grid.verts[o]);
                    verts.push([xi[0] + s * (xo[0] - xi[0]), xi[1] + s * (xo[1] - xi[1])]);
                    boundary.push(verts.len() - 1);
                    verts.len() - 1
                });
                poly.push(id);
            }
        }
        for k in 1..poly.len().saturating_sub(1) {
            tris.push([poly[0], poly[k], poly[k + 1]]);
        }
    }
    if tris.is_empty() {
        return Err(Error::EmptyComponent);
    }

    // Drop vertices that ended up in no triangle (On-vertices of skipped cells).
    let mut used = vec![false; verts.len()];
    for t in &tris {
        for &k in t {
            used[k] = true;
        }
    }
    let mut remap = vec![usize::MAX; verts.len()];
    let mut kept = Vec::with_capacity(verts.len());
    for (k, v) in verts.iter().enumerate() {
        if used[k] {
            remap[k] = kept.len();
            kept.push(*v);
        }
    }
    let tris: Vec<[usize; 3]> = tris.into_iter().map(|t| t.map(|k| remap[k])).collect();
    let boundary: Vec<usize> = boundary.into_iter().filter(|&k| used[k]).map(|k| remap[k]).collect();

    let metrics = tris
        .iter()
        .map(|t| {
            let c = [
                (kept[t[0]][0] + kept[t[1]][0] + kept[t[2]][0]) / 3.0,
                (kept[t[0]][1] + kept[t[1]][1] + kept[t[2]][1]) / 3.0,
            ];
            imm.first_fundamental_form(c)
        })
        .collect::<Result<Vec<_>>>()?;
    RiemannianMesh::new(kept, Elements::Triangles(tris), metrics, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pullback_distance_field, Cylinder, Equidistant, Plane};
    use std::f64::consts::PI;

    #[test]
    fn plane_patch_is_a_disk() {
        let plane = Plane { half_width: 3.0 };
        let (d, r) = (1.0, 2.0);
        let mesh = immersed_patch_mesh(&plane, &[0.0, 0.0, d], r, 200).unwrap();
        let exact = PI * (r * r - d * d);
        assert!(((mesh.volume().unwrap() - exact) / exact).abs() < 1e-3);
    }

    #[test]
    fn cylinder_patch_stays_inside_the_ball() {
        let cyl = Cylinder { radius: 1.0, half_length: 2.0 };
        let p = [0.9, 0.0, 0.0];
        let mesh = immersed_patch_mesh(&cyl, &p, 0.5, 80).unwrap();
        assert!(mesh.n_elements() > 0);
        let f = pullback_distance_field(&cyl, &p, &mesh).unwrap();
        let tol = mesh.mesh_size();
        assert!(f.values.iter().all(|&v| v <= 0.5 + tol));
        for &b in mesh.boundary_vertices() {
            assert!((f.values[b] - 0.5).abs() < tol * tol);
        }
    }

    #[test]
    fn totally_geodesic_patch_is_a_hyperbolic_disk() {
        let imm = Equidistant::totally_geodesic(3.0);
        let d: f64 = 0.5;
        let p = [d.cosh(), 0.0, 0.0, d.sinh()];
        let s = (2f64.cosh() / d.cosh()).acosh();
        assert!((s - 1.8747798369).abs() < 1e-9);
        let mesh = immersed_patch_mesh(&imm, &p, 2.0, 160).unwrap();
        let exact = 2.0 * PI * (s.cosh() - 1.0);
        assert!(((mesh.volume().unwrap() - exact) / exact).abs() < 2e-3);
        let f = pullback_distance_field(&imm, &p, &mesh).unwrap();
        let min = f.values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - d).abs() < 1e-3);
    }

    #[test]
    fn empty_and_oversized_components_are_rejected() {
        let plane = Plane { half_width: 1.0 };
        assert!(matches!(
            immersed_patch_mesh(&plane, &[0.0, 0.0, 1.0], 0.5, 20),
            Err(Error::EmptyComponent)
        ));
        assert!(matches!(
            immersed_patch_mesh(&plane, &[0.0, 0.0, 1.0], 3.0, 20),
            Err(Error::ComponentTouchesChartBoundary)
        ));
    }
}
