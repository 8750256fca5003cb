//! Marching squares on an arbitrary quad mesh, with the asymptotic decider on
//! saddle cells. Crossings are shared between cells through their edge key, so
//! seams of multi-chart meshes need no special handling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
#[allow(unused_imports)]
use num_traits::Float;

use super::union_find::UnionFind;
use super::{Component, Signature};
use crate::error::{Error, Result};

/// Saddle values below this multiple of the corner scale are degenerate.
const SADDLE_TOLERANCE: f64 = 1e-12;

/// Piecewise-linear zero set of a function on a quad mesh.
#[derive(Debug, Clone, Default)]
pub struct ContourGraph {
    /// Mesh edge `(lo, hi)` carrying each crossing.
    pub keys: Vec<(u32, u32)>,
    pub index: HashMap<(u32, u32), usize>,
    /// Flattened crossing positions.
    pub positions: Vec<f64>,
    pub segments: Vec<(usize, usize)>,
    pub segment_cell: Vec<usize>,
    point_dim: usize,
}

impl ContourGraph {
    pub fn new(point_dim: usize) -> Self {
        Self { point_dim, ..Default::default() }
    }

    fn crossing(
        &mut self,
        a: usize,
        b: usize,
        values: &[f64],
        position: &mut impl FnMut(usize, &mut [f64]),
        normalize: bool,
    ) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let key = (lo as u32, hi as u32);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let (vl, vh) = (values[lo], values[hi]);
        let t = vl / (vl - vh);
        let d = self.point_dim;
        let mut pl = vec![0.0; d];
        let mut ph = vec![0.0; d];
        position(lo, &mut pl);
        position(hi, &mut ph);
        let mut p: Vec<f64> = pl.iter().zip(&ph).map(|(x, y)| x + t * (y - x)).collect();
        if normalize {
            let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            p.iter_mut().for_each(|v| *v /= n);
        }
        let id = self.keys.len();
        self.keys.push(key);
        self.positions.extend_from_slice(&p);
        self.index.insert(key, id);
        id
    }

    /// Adds the contour pieces of one cell with corners `[a, b, c, d]` in cyclic
    /// order.
    pub fn add_cell(
        &mut self,
        cell: usize,
        corners: [usize; 4],
        values: &[f64],
        position: &mut impl FnMut(usize, &mut [f64]),
        normalize: bool,
    ) -> Result<()> {
        let v = corners.map(|i| values[i]);
        let pos = v.map(|x| x > 0.0);
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let mut hits = [usize::MAX; 4];
        let mut count = 0;
        for (e, &(i, j)) in edges.iter().enumerate() {
            if pos[i] != pos[j] {
                hits[e] = self.crossing(corners[i], corners[j], values, position, normalize);
                count += 1;
            }
        }
        match count {
            0 => {}
            2 => {
                let mut it = hits.iter().filter(|&&h| h != usize::MAX);
                let (p, q) = (*it.next().unwrap(), *it.next().unwrap());
                self.push_segment(p, q, cell);
            }
            4 => {
                let [a, b, c, d] = v;
                let denom = a + c - b - d;
                let scale = v.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
                if denom.abs() <= SADDLE_TOLERANCE * scale {
                    return Err(Error::Degenerate(format!("flat saddle in cell {cell}")));
                }
                let saddle = (a * c - b * d) / denom;
                if saddle.abs() <= SADDLE_TOLERANCE * scale {
                    return Err(Error::Degenerate(format!("zero saddle value in cell {cell}")));
                }
                if (saddle > 0.0) == pos[0] {
                    // a and c connect through the centre: cut off corners b and d.
                    self.push_segment(hits[0], hits[1], cell);
                    self.push_segment(hits[2], hits[3], cell);
                } else {
                    self.push_segment(hits[3], hits[0], cell);
                    self.push_segment(hits[1], hits[2], cell);
                }
            }
            _ => unreachable!("a quad has an even number of sign changes"),
        }
        Ok(())
    }

    fn push_segment(&mut self, p: usize, q: usize, cell: usize) {
        self.segments.push((p, q));
        self.segment_cell.push(cell);
    }

    /// Per-crossing component labels and their count.
    pub fn labels(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.keys.len());
        for &(p, q) in &self.segments {
            uf.union(p, q);
        }
        uf.labels()
    }

    /// Components with `χ = V - E`; closed iff every crossing has degree 2.
    pub fn components(&self) -> Vec<Component> {
        let (labels, k) = self.labels();
        let mut degree = vec![0u32; self.keys.len()];
        for &(p, q) in &self.segments {
            degree[p] += 1;
            degree[q] += 1;
        }
        let mut verts = vec![0i64; k];
        let mut edges = vec![0i64; k];
        let mut closed = vec![true; k];
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); k];
        let mut points: Vec<Vec<f64>> = vec![Vec::new(); k];
        let d = self.point_dim;
        for (i, &l) in labels.iter().enumerate() {
            verts[l] += 1;
            if degree[i] != 2 {
                closed[l] = false;
            }
            points[l].extend_from_slice(&self.positions[i * d..(i + 1) * d]);
        }
        for (s, &(p, _)) in self.segments.iter().enumerate() {
            let l = labels[p];
            edges[l] += 1;
            cells[l].push(self.segment_cell[s]);
        }
        (0..k)
            .map(|l| {
                let mut c = core::mem::take(&mut cells[l]);
                c.sort_unstable();
                c.dedup();
                let euler = verts[l] - edges[l];
                let signature = Signature { dim: 1, euler, orientable: true };
                Component { signature, closed: closed[l], cells: c, points: core::mem::take(&mut points[l]), antipodal_invariant: None }
            })
            .collect()
    }
}
