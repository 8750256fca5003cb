//! Common zeros of `r ≥ 2` functions on a grid: sign filtering of cells, damped
//! minimum-norm Newton refinement and ε-clustering of the refined points.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
#[allow(unused_imports)]
use num_traits::Float;

use super::union_find::UnionFind;
use super::{Component, ComponentReport, QuotientMode, Signature};
use crate::error::{invalid, Result};
use crate::field::GridSpec;
use crate::func::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CodimOptions {
    pub max_iterations: usize,
    /// Residual target relative to the largest grid value.
    pub tolerance: f64,
    /// Clustering radius in cell diagonals for curves (`n - r = 1`).
    pub cluster_factor: f64,
    /// Radius in cell diagonals under which refined isolated roots coincide.
    pub merge_factor: f64,
}

impl Default for CodimOptions {
    fn default() -> Self {
        Self { max_iterations: 60, tolerance: 1e-10, cluster_factor: 2.0, merge_factor: 1e-6 }
    }
}

enum Refined {
    Root(Vec<f64>),
    Escaped,
    Unresolved,
}

fn residual(fs: &[&dyn ScalarField], x: &[f64], out: &mut [f64]) -> f64 {
    let mut s = 0.0;
    for (o, f) in out.iter_mut().zip(fs) {
        *o = f.eval(x);
        s += *o * *o;
    }
    s.sqrt()
}

/// Solves the small dense system `a x = b` by partial pivoting; `None` if singular.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        for k in 0..n {
            a.swap(col * n + k, piv * n + k);
        }
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

fn refine(fs: &[&dyn ScalarField], start: &[f64], h: f64, reach: f64, tol: f64, max_iter: usize) -> Refined {
    let n = start.len();
    let r = fs.len();
    let mut x = start.to_vec();
    let mut fx = vec![0.0; r];
    let mut norm = residual(fs, &x, &mut fx);
    let delta = 1e-5 * h;
    let mut jac = vec![0.0; r * n];
    let mut probe = x.clone();
    let mut fp = vec![0.0; r];
    let mut fm = vec![0.0; r];
    for _ in 0..max_iter {
        if norm <= tol {
            return Refined::Root(x);
        }
        for k in 0..n {
            probe.copy_from_slice(&x);
            probe[k] = x[k] + delta;
            residual(fs, &probe, &mut fp);
            probe[k] = x[k] - delta;
            residual(fs, &probe, &mut fm);
            for i in 0..r {
                jac[i * n + k] = (fp[i] - fm[i]) / (2.0 * delta);
            }
        }
        // Minimum-norm step Jᵀ (J Jᵀ)⁻¹ f.
        let mut jjt = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                jjt[i * r + j] = (0..n).map(|k| jac[i * n + k] * jac[j * n + k]).sum();
            }
        }
        let Some(y) = solve(jjt, fx.clone(), r) else {
            return Refined::Unresolved;
        };
        let step: Vec<f64> = (0..n).map(|k| (0..r).map(|i| jac[i * n + k] * y[i]).sum()).collect();
        let mut alpha = 1.0;
        let mut accepted = false;
        let mut trial = vec![0.0; n];
        let mut ft = vec![0.0; r];
        for _ in 0..30 {
            for k in 0..n {
                trial[k] = x[k] - alpha * step[k];
            }
            let nt = residual(fs, &trial, &mut ft);
            if nt < norm {
                x.copy_from_slice(&trial);
                fx.copy_from_slice(&ft);
                norm = nt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        let dist = x.iter().zip(start).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist > reach {
            return Refined::Escaped;
        }
        let step_norm = alpha * step.iter().map(|s| s * s).sum::<f64>().sqrt();
        if !accepted || step_norm < 1e-13 * h {
            return if norm <= tol * 1e3 { Refined::Root(x) } else { Refined::Unresolved };
        }
    }
    if norm <= tol {
        Refined::Root(x)
    } else {
        Refined::Unresolved
    }
}

/// Cells (as flat cell indices) where every function changes sign.
fn candidate_cells(values: &[Vec<f64>], grid: &GridSpec) -> Vec<usize> {
    let n = grid.dim();
    let r = grid.resolution;
    let cells_per_axis = r - 1;
    let total = cells_per_axis.pow(n as u32);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    let mut corner = vec![0usize; n];
    for cell in 0..total {
        let mut rem = cell;
        for i in idx.iter_mut() {
            *i = rem % cells_per_axis;
            rem /= cells_per_axis;
        }
        let all = values.iter().all(|vals| {
            let (mut pos, mut neg) = (false, false);
            for bits in 0..(1usize << n) {
                for k in 0..n {
                    corner[k] = idx[k] + ((bits >> k) & 1);
                }
                if vals[grid.ravel(&corner)] > 0.0 {
                    pos = true;
                } else {
                    neg = true;
                }
            }
            pos && neg
        });
        if all {
            out.push(cell);
        }
    }
    out
}

fn cell_center(grid: &GridSpec, cell: usize) -> Vec<f64> {
    let per = grid.resolution - 1;
    let h = grid.spacing();
    let mut rem = cell;
    (0..grid.dim())
        .map(|k| {
            let i = rem % per;
            rem /= per;
            grid.axis_coordinate(k, i) + 0.5 * h
        })
        .collect()
}

/// Union of points closer than `eps`, using a spatial hash of bucket size `eps`.
fn cluster(points: &[Vec<f64>], eps: f64) -> (Vec<usize>, usize) {
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let key: Vec<i64> = p.iter().map(|v| (v / eps).floor() as i64).collect();
        buckets.entry(key).or_default().push(i);
    }
    let mut uf = UnionFind::new(points.len());
    let n = points.first().map_or(0, |p| p.len());
    for (i, p) in points.iter().enumerate() {
        let key: Vec<i64> = p.iter().map(|v| (v / eps).floor() as i64).collect();
        for off in 0..3usize.pow(n as u32) {
            let mut rem = off;
            let nb: Vec<i64> = key
                .iter()
                .map(|k| {
                    let d = (rem % 3) as i64 - 1;
                    rem /= 3;
                    k + d
                })
                .collect();
            if let Some(list) = buckets.get(&nb) {
                for &j in list {
                    if j > i {
                        let d2: f64 = p.iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                        if d2 <= eps * eps {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }
    uf.labels()
}

/// Components of `{f_1 = … = f_r = 0}` on `grid`, counts only: isolated points
/// when `r = n`, and circles among closed components when `n - r = 1`.
pub fn extract_components_codim_r(fs: &[&dyn ScalarField], grid: &GridSpec, opts: &CodimOptions) -> Result<ComponentReport> {
    let n = grid.dim();
    let r = fs.len();
    if r < 2 || r > n || fs.iter().any(|f| f.dim() != n) {
        return Err(invalid("codimension extraction needs 2 ≤ r ≤ n functions on the grid"));
    }
    let values: Vec<Vec<f64>> = fs.iter().map(|f| f.eval_grid(grid)).collect();
    let scale = values.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let h = grid.spacing();
    let diag = h * (n as f64).sqrt();
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut root_cells: Vec<usize> = Vec::new();
    let mut unresolved = 0;
    for cell in candidate_cells(&values, grid) {
        let c = cell_center(grid, cell);
        match refine(fs, &c, h, diag, opts.tolerance * scale, opts.max_iterations) {
            Refined::Root(x) => {
                roots.push(x);
                root_cells.push(cell);
            }
            Refined::Escaped => {}
            Refined::Unresolved => unresolved += 1,
        }
    }
    let eps = if r == n { opts.merge_factor } else { opts.cluster_factor } * diag;
    let (labels, k) = cluster(&roots, eps);
    let mut comps: Vec<Component> = (0..k)
        .map(|_| Component {
            signature: Signature::point(),
            closed: true,
            cells: Vec::new(),
            points: Vec::new(),
            antipodal_invariant: None,
        })
        .collect();
    for (i, &l) in labels.iter().enumerate() {
        comps[l].cells.push(root_cells[i]);
        comps[l].points.extend_from_slice(&roots[i]);
        let margin = (0..n)
            .map(|a| {
                let lo = grid.center[a] - grid.radius;
                let hi = grid.center[a] + grid.radius;
                (roots[i][a] - lo).min(hi - roots[i][a])
            })
            .fold(f64::INFINITY, f64::min);
        if margin < diag {
            comps[l].closed = false;
        }
    }
    for c in comps.iter_mut() {
        c.cells.sort_unstable();
        c.cells.dedup();
        c.signature = match n - r {
            0 => Signature::point(),
            1 if c.closed => Signature::circle(),
            d => Signature { dim: d, euler: if d == 1 { 1 } else { 0 }, orientable: true },
        };
    }
    Ok(ComponentReport {
        components: comps,
        domain_dim: n,
        point_dim: n,
        grid: Some(grid.clone()),
        sphere_resolution: None,
        quotient: QuotientMode::None,
        unresolved_cells: unresolved,
    })
}

/// Independent count: connected clusters (sharing a vertex) of cells in which
/// every function changes sign.
pub fn sign_cell_clusters(fs: &[&dyn ScalarField], grid: &GridSpec) -> usize {
    let values: Vec<Vec<f64>> = fs.iter().map(|f| f.eval_grid(grid)).collect();
    let cells = candidate_cells(&values, grid);
    let n = grid.dim();
    let per = grid.resolution - 1;
    let lookup: HashMap<usize, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut uf = UnionFind::new(cells.len());
    for (i, &c) in cells.iter().enumerate() {
        let mut idx = vec![0i64; n];
        let mut rem = c;
        for v in idx.iter_mut() {
            *v = (rem % per) as i64;
            rem /= per;
        }
        for off in 0..3usize.pow(n as u32) {
            let mut rem = off;
            let mut flat = 0usize;
            let mut stride = 1usize;
            let mut ok = true;
            for &v in &idx {
                let nb = v + (rem % 3) as i64 - 1;
                rem /= 3;
                if nb < 0 || nb >= per as i64 {
                    ok = false;
                    break;
                }
                flat += nb as usize * stride;
                stride *= per;
            }
            if ok {
                if let Some(&j) = lookup.get(&flat) {
                    uf.union(i, j);
                }
            }
        }
    }
    uf.labels().1
}
