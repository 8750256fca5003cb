//! Zero sets on whole spheres: the cube-sphere grid of `S^2`, the uniform grid
//! of `S^1`, and the antipodal quotient.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::contour::ContourGraph;
use super::planar::{GRID_ZERO_TOLERANCE, MAX_OFFSET_ATTEMPTS, OFFSET_FRACTION};
use super::union_find::UnionFind;
use super::{Component, ComponentReport, QuotientMode, Signature};
use crate::error::{invalid, Error, Result};
use crate::func::SphereFunction;

/// Rotation used to move a degenerate spherical grid: angle `2π(2 - φ)/8`
/// about the axis `(1, 2, 3)/√14`.
fn retry_rotation(attempt: usize) -> [[f64; 3]; 3] {
    let axis = [1.0 / 14f64.sqrt(), 2.0 / 14f64.sqrt(), 3.0 / 14f64.sqrt()];
    let angle = attempt as f64 * 2.0 * PI * OFFSET_FRACTION / 8.0;
    let (s, c) = angle.sin_cos();
    let [x, y, z] = axis;
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

fn rotate(r: &[[f64; 3]; 3], p: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2])
}

/// Odd-symmetric equiangular coordinate: `tan(π c / 4)` with `±1 ↦ ±1` exactly.
fn equiangular(c: f64) -> f64 {
    let a = c.abs();
    let u = if a == 1.0 { 1.0 } else { (PI / 4.0 * a).tan() };
    if c < 0.0 {
        -u
    } else {
        u
    }
}

/// The surface lattice of the cube `[0, k-1]^3`, projected radially to `S^2`
/// with equiangular spacing on each face.
///
/// The antipodal map is the lattice reflection `i ↦ k-1-i`, so the grid is
/// exactly symmetric.
#[derive(Debug, Clone)]
pub struct CubeSphere {
    k: usize,
    positions: Vec<[f64; 3]>,
    face_vertex: Vec<u32>,
    antipode: Vec<u32>,
}

impl CubeSphere {
    /// `k` lattice points per cube edge.
    pub fn new(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(invalid("cube-sphere needs at least 3 points per edge"));
        }
        let km = k - 1;
        let mut face_vertex = vec![u32::MAX; 6 * k * k];
        let mut positions = Vec::with_capacity(6 * km * km + 2);
        let mut lattices: Vec<[usize; 3]> = Vec::with_capacity(6 * km * km + 2);
        for f in 0..6 {
            for b in 0..k {
                for a in 0..k {
                    let l = Self::lattice(k, f, a, b);
                    let owner = Self::first_face(k, &l);
                    let id = if owner == f {
                        let id = positions.len() as u32;
                        let w = l.map(|i| equiangular((2 * i) as f64 / km as f64 - 1.0));
                        let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                        positions.push(w.map(|v| v / n));
                        lattices.push(l);
                        id
                    } else {
                        let (oa, ob) = Self::local(owner, &l);
                        face_vertex[owner * k * k + oa + k * ob]
                    };
                    face_vertex[f * k * k + a + k * b] = id;
                }
            }
        }
        let mut s = Self { k, positions, face_vertex, antipode: Vec::new() };
        s.antipode = lattices.iter().map(|l| s.lookup(&l.map(|i| km - i))).collect();
        Ok(s)
    }

    fn lattice(k: usize, face: usize, a: usize, b: usize) -> [usize; 3] {
        let (axis, side) = (face / 2, face % 2);
        let mut l = [0; 3];
        l[axis] = side * (k - 1);
        l[(axis + 1) % 3] = a;
        l[(axis + 2) % 3] = b;
        l
    }

    fn first_face(k: usize, l: &[usize; 3]) -> usize {
        (0..6).find(|&f| l[f / 2] == (f % 2) * (k - 1)).expect("lattice point on the cube surface")
    }

    fn local(face: usize, l: &[usize; 3]) -> (usize, usize) {
        let axis = face / 2;
        (l[(axis + 1) % 3], l[(axis + 2) % 3])
    }

    fn lookup(&self, l: &[usize; 3]) -> u32 {
        let f = Self::first_face(self.k, l);
        let (a, b) = Self::local(f, l);
        self.face_vertex[f * self.k * self.k + a + self.k * b]
    }

    pub fn edge_points(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn cell_count(&self) -> usize {
        6 * (self.k - 1) * (self.k - 1)
    }

    pub fn position(&self, i: usize) -> [f64; 3] {
        self.positions[i]
    }

    pub fn antipode(&self, i: usize) -> usize {
        self.antipode[i] as usize
    }

    /// Largest geodesic edge length, attained on the central lines of the faces.
    pub fn max_spacing(&self) -> f64 {
        PI / 2.0 / (self.k - 1) as f64
    }

    fn cells(&self) -> impl Iterator<Item = (usize, [usize; 4])> + '_ {
        let k = self.k;
        (0..6).flat_map(move |f| {
            (0..k - 1).flat_map(move |b| {
                (0..k - 1).map(move |a| {
                    let v = |a: usize, b: usize| self.face_vertex[f * k * k + a + k * b] as usize;
                    (f * (k - 1) * (k - 1) + a + (k - 1) * b, [v(a, b), v(a + 1, b), v(a + 1, b + 1), v(a, b + 1)])
                })
            })
        })
    }

    /// Values of `f` at the (rotated) vertices. A homogeneous `f` is evaluated on
    /// half of the grid and extended by exact parity.
    pub fn values(&self, f: &impl SphereFunction, rotation: Option<&[[f64; 3]; 3]>) -> Result<Vec<f64>> {
        if f.ambient_dim() != 3 {
            return Err(invalid("cube-sphere grids live on S^2"));
        }
        let point = |i: usize| match rotation {
            Some(r) => rotate(r, &self.positions[i]),
            None => self.positions[i],
        };
        let mut out = vec![0.0; self.positions.len()];
        match f.homogeneous_degree() {
            Some(m) => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                for i in 0..out.len() {
                    let j = self.antipode(i);
                    if i < j {
                        let v = f.eval_unit(&point(i));
                        out[i] = v;
                        out[j] = sign * v;
                    }
                }
            }
            None => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = f.eval_unit(&point(i));
                }
            }
        }
        Ok(out)
    }

    /// Zero set of `f` on the sphere, rotating the grid on degeneracy.
    pub fn extract(&self, f: &impl SphereFunction) -> Result<SphereExtraction> {
        let mut last = Error::Degenerate(alloc::string::String::new());
        for attempt in 0..=MAX_OFFSET_ATTEMPTS {
            let rot = retry_rotation(attempt);
            let rotation = if attempt == 0 { None } else { Some(&rot) };
            let values = self.values(f, rotation)?;
            match self.extract_values(&values, rotation) {
                Ok(r) => return Ok(r),
                Err(e @ Error::Degenerate(_)) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }

    /// Zero set of vertex values (positions optionally rotated).
    pub fn extract_values(&self, values: &[f64], rotation: Option<&[[f64; 3]; 3]>) -> Result<SphereExtraction> {
        if values.len() != self.positions.len() {
            return Err(invalid("value count does not match the cube-sphere"));
        }
        if let Some(i) = values.iter().position(|v| v.abs() < GRID_ZERO_TOLERANCE) {
            return Err(Error::Degenerate(format!("value {:e} at sphere vertex {i}", values[i])));
        }
        let mut graph = ContourGraph::new(3);
        let mut position = |i: usize, out: &mut [f64]| {
            let p = match rotation {
                Some(r) => rotate(r, &self.positions[i]),
                None => self.positions[i],
            };
            out.copy_from_slice(&p);
        };
        for (cell, corners) in self.cells() {
            graph.add_cell(cell, corners, values, &mut position, true)?;
        }
        let components = graph.components();
        let report = ComponentReport {
            components,
            domain_dim: 2,
            point_dim: 3,
            grid: None,
            sphere_resolution: Some(self.k),
            quotient: QuotientMode::None,
            unresolved_cells: 0,
        };
        let (labels, _) = graph.labels();
        Ok(SphereExtraction { report, keys: graph.keys, index: graph.index, labels })
    }
}

/// A zero set on the cube-sphere together with the crossing data needed for the
/// antipodal quotient.
#[derive(Debug, Clone)]
pub struct SphereExtraction {
    pub report: ComponentReport,
    keys: Vec<(u32, u32)>,
    index: hashbrown::HashMap<(u32, u32), usize>,
    labels: Vec<usize>,
}

impl SphereExtraction {
    fn antipodal_crossing(&self, sphere: &CubeSphere, c: usize) -> Result<usize> {
        let (a, b) = self.keys[c];
        let (sa, sb) = (sphere.antipode(a as usize) as u32, sphere.antipode(b as usize) as u32);
        let key = if sa < sb { (sa, sb) } else { (sb, sa) };
        self.index
            .get(&key)
            .copied()
            .ok_or_else(|| Error::PairingMismatch(format!("crossing {c} has no antipodal crossing")))
    }
}

/// Quotient by `x ↦ -x`, counting components first and pairing them after.
///
/// Each component maps to the component of its antipodal crossings; the map
/// must be a well-defined involution. Invariant components keep the
/// signature of their preimage and are flagged.
pub fn antipodal_quotient(sphere: &CubeSphere, ext: &SphereExtraction) -> Result<ComponentReport> {
    let k = ext.report.components.len();
    let mut image = vec![usize::MAX; k];
    for c in 0..ext.keys.len() {
        let l = ext.labels[c];
        let t = ext.labels[ext.antipodal_crossing(sphere, c)?];
        if image[l] == usize::MAX {
            image[l] = t;
        } else if image[l] != t {
            return Err(Error::PairingMismatch(format!("component {l} maps to several components")));
        }
    }
    let mut components = Vec::new();
    for l in 0..k {
        let t = image[l];
        if image[t] != l {
            return Err(Error::PairingMismatch(format!("antipodal map is not an involution on component {l}")));
        }
        if t < l {
            continue;
        }
        let mut comp: Component = ext.report.components[l].clone();
        comp.antipodal_invariant = Some(t == l);
        components.push(comp);
    }
    Ok(ComponentReport { components, quotient: QuotientMode::Antipodal, ..ext.report.clone() })
}

/// Quotient component count by identifying every crossing with its antipode
/// before labelling (counting on the projective plane directly).
pub fn quotient_by_identification(sphere: &CubeSphere, ext: &SphereExtraction) -> Result<usize> {
    let n = ext.keys.len();
    let mut uf = UnionFind::new(n);
    for c in 0..n {
        uf.union(c, ext.antipodal_crossing(sphere, c)?);
    }
    let mut comp_uf = UnionFind::new(ext.report.components.len());
    for c in 0..n {
        let r = uf.find(c);
        comp_uf.union(ext.labels[c], ext.labels[r]);
    }
    Ok(comp_uf.labels().1)
}

/// Zeros of `f` on `S^1` sampled at `points` equally spaced angles; every
/// sign change between neighbours is one point component.
pub fn extract_on_circle(f: &impl SphereFunction, points: usize) -> Result<ComponentReport> {
    if f.ambient_dim() != 2 || points < 4 {
        return Err(invalid("circle grids need a function on S^1 and at least 4 points"));
    }
    let mut last = Error::Degenerate(alloc::string::String::new());
    for attempt in 0..=MAX_OFFSET_ATTEMPTS {
        let shift = attempt as f64 * OFFSET_FRACTION * 2.0 * PI / points as f64;
        let angle = |j: usize| 2.0 * PI * j as f64 / points as f64 + shift;
        let values: Vec<f64> = (0..points)
            .map(|j| {
                let (s, c) = angle(j).sin_cos();
                f.eval_unit(&[c, s])
            })
            .collect();
        if let Some(i) = values.iter().position(|v| v.abs() < GRID_ZERO_TOLERANCE) {
            last = Error::Degenerate(format!("value {:e} at circle point {i}", values[i]));
            continue;
        }
        let components = (0..points)
            .filter(|&j| (values[j] > 0.0) != (values[(j + 1) % points] > 0.0))
            .map(|j| {
                let (a, b) = (values[j], values[(j + 1) % points]);
                let th = angle(j) + a / (a - b) * 2.0 * PI / points as f64;
                let (s, c) = th.sin_cos();
                Component { signature: Signature::point(), closed: true, cells: vec![j], points: vec![c, s], antipodal_invariant: None }
            })
            .collect();
        return Ok(ComponentReport {
            components,
            domain_dim: 1,
            point_dim: 2,
            grid: None,
            sphere_resolution: Some(points),
            quotient: QuotientMode::None,
            unresolved_cells: 0,
        });
    }
    Err(last)
}
