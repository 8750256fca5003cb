//! Isosurfaces of trivariate grids by marching tetrahedra on the Kuhn
//! subdivision of every cube. The subdivision is conforming across cubes, so no
//! case table is ambiguous and the mesh is a closed surface away from the
//! boundary of the box.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::union_find::UnionFind;
use super::{Component, Signature};
use crate::field::GridSpec;

/// Vertex offsets `[0, e_a, e_a + e_b, 7]` of the six tetrahedra, as bit masks
/// (`x = 1`, `y = 2`, `z = 4`).
const KUHN: [[u8; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

/// A triangle soup with shared vertices.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TriangleMesh {
    /// Flattened `xyz` positions.
    pub vertices: Vec<f64>,
    pub triangles: Vec<[u32; 3]>,
    /// Cube index of each triangle.
    pub triangle_cell: Vec<usize>,
}

impl TriangleMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len() / 3
    }
}

struct Builder<'a> {
    grid: &'a GridSpec,
    values: &'a [f64],
    index: HashMap<(u32, u8), u32>,
    mesh: TriangleMesh,
}

impl Builder<'_> {
    fn vertex_id(&self, base: [usize; 3], offset: u8) -> usize {
        let r = self.grid.resolution;
        let o = offset as usize;
        (base[0] + (o & 1)) + r * ((base[1] + ((o >> 1) & 1)) + r * (base[2] + ((o >> 2) & 1)))
    }

    /// Crossing on the tetrahedron edge between offsets `u ⊂ w`.
    fn crossing(&mut self, base: [usize; 3], u: u8, w: u8) -> u32 {
        let (lo, hi) = if u & w == u { (u, w) } else { (w, u) };
        let a = self.vertex_id(base, lo);
        let key = (a as u32, hi ^ lo);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let b = self.vertex_id(base, hi);
        let (va, vb) = (self.values[a], self.values[b]);
        let t = va / (va - vb);
        let (mut pa, mut pb) = ([0.0; 3], [0.0; 3]);
        self.grid.point(a, &mut pa);
        self.grid.point(b, &mut pb);
        let id = (self.mesh.vertices.len() / 3) as u32;
        for k in 0..3 {
            self.mesh.vertices.push(pa[k] + t * (pb[k] - pa[k]));
        }
        self.index.insert(key, id);
        id
    }

    fn tetrahedron(&mut self, cell: usize, base: [usize; 3], tet: [u8; 4]) {
        let ids = tet.map(|o| self.vertex_id(base, o));
        let pos = ids.map(|i| self.values[i] > 0.0);
        let inside: Vec<usize> = (0..4).filter(|&i| pos[i]).collect();
        let outside: Vec<usize> = (0..4).filter(|&i| !pos[i]).collect();
        match inside.len() {
            1 | 3 => {
                let (apex, rest) = if inside.len() == 1 { (inside[0], outside) } else { (outside[0], inside) };
                let c: Vec<u32> = rest.iter().map(|&j| self.crossing(base, tet[apex], tet[j])).collect();
                self.push([c[0], c[1], c[2]], cell);
            }
            2 => {
                let (p, q) = (inside[0], inside[1]);
                let (r, s) = (outside[0], outside[1]);
                let pr = self.crossing(base, tet[p], tet[r]);
                let ps = self.crossing(base, tet[p], tet[s]);
                let qs = self.crossing(base, tet[q], tet[s]);
                let qr = self.crossing(base, tet[q], tet[r]);
                self.push([pr, ps, qs], cell);
                self.push([pr, qs, qr], cell);
            }
            _ => {}
        }
    }

    fn push(&mut self, t: [u32; 3], cell: usize) {
        self.mesh.triangles.push(t);
        self.mesh.triangle_cell.push(cell);
    }
}

/// Zero surface of `values` on a three-dimensional grid.
pub(crate) fn march(grid: &GridSpec, values: &[f64]) -> TriangleMesh {
    let r = grid.resolution;
    let mut b = Builder { grid, values, index: HashMap::new(), mesh: TriangleMesh::default() };
    for k in 0..r - 1 {
        for j in 0..r - 1 {
            for i in 0..r - 1 {
                let corners = [0u8, 1, 2, 3, 4, 5, 6, 7].map(|o| values[b.vertex_id([i, j, k], o)] > 0.0);
                if corners.iter().all(|&c| c == corners[0]) {
                    continue;
                }
                let cell = i + (r - 1) * (j + (r - 1) * k);
                for tet in KUHN {
                    b.tetrahedron(cell, [i, j, k], tet);
                }
            }
        }
    }
    b.mesh
}

/// Components of a triangle mesh with `χ = V - E + F`, closedness (every edge
/// on exactly two triangles) and orientability by orientation propagation.
pub(crate) fn mesh_components(mesh: &TriangleMesh) -> Vec<Component> {
    let nv = mesh.vertex_count();
    let mut uf = UnionFind::new(nv);
    for t in &mesh.triangles {
        uf.union(t[0] as usize, t[1] as usize);
        uf.union(t[0] as usize, t[2] as usize);
    }
    let (labels, k) = uf.labels();

    // Edge -> incident (triangle, traversed lo->hi).
    let mut edges: HashMap<(u32, u32), Vec<(usize, bool)>> = HashMap::new();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            let key = if a < b { (a, b) } else { (b, a) };
            edges.entry(key).or_default().push((ti, a < b));
        }
    }

    let mut verts = vec![0i64; k];
    let mut faces = vec![0i64; k];
    let mut edge_count = vec![0i64; k];
    let mut closed = vec![true; k];
    for &l in &labels {
        verts[l] += 1;
    }
    for t in &mesh.triangles {
        faces[labels[t[0] as usize]] += 1;
    }
    for (key, inc) in &edges {
        let l = labels[key.0 as usize];
        edge_count[l] += 1;
        if inc.len() != 2 {
            closed[l] = false;
        }
    }

    // Orientation propagation; flip[t] is the orientation assigned to t.
    let mut tri_edges: Vec<[(u32, u32); 3]> = Vec::with_capacity(mesh.triangles.len());
    for t in &mesh.triangles {
        let mut es = [(0, 0); 3];
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            es[e] = if a < b { (a, b) } else { (b, a) };
        }
        tri_edges.push(es);
    }
    let mut flip: Vec<Option<bool>> = vec![None; mesh.triangles.len()];
    let mut orientable = vec![true; k];
    let mut queue = VecDeque::new();
    for start in 0..mesh.triangles.len() {
        if flip[start].is_some() {
            continue;
        }
        flip[start] = Some(false);
        queue.push_back(start);
        while let Some(t) = queue.pop_front() {
            let ft = flip[t].unwrap();
            for key in tri_edges[t] {
                let inc = &edges[&key];
                if inc.len() != 2 {
                    continue;
                }
                let (dt, (u, du)) = if inc[0].0 == t { (inc[0].1, inc[1]) } else { (inc[1].1, inc[0]) };
                // Neighbours must traverse the shared edge in opposite directions.
                let fu = dt ^ ft ^ du ^ true;
                match flip[u] {
                    None => {
                        flip[u] = Some(fu);
                        queue.push_back(u);
                    }
                    Some(f) if f != fu => orientable[labels[mesh.triangles[t][0] as usize]] = false,
                    _ => {}
                }
            }
        }
    }

    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (ti, t) in mesh.triangles.iter().enumerate() {
        cells[labels[t[0] as usize]].push(mesh.triangle_cell[ti]);
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        points[l].extend_from_slice(&mesh.vertices[3 * i..3 * i + 3]);
    }
    (0..k)
        .map(|l| {
            let mut c = core::mem::take(&mut cells[l]);
            c.sort_unstable();
            c.dedup();
            Component {
                signature: Signature { dim: 2, euler: verts[l] - edge_count[l] + faces[l], orientable: orientable[l] },
                closed: closed[l],
                cells: c,
                points: core::mem::take(&mut points[l]),
                antipodal_invariant: None,
            }
        })
        .collect()
}
