//! Small dense linear algebra: row-major matrices, Cholesky, ridge least squares.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ · v`
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor `A = L Lᵀ` with its pivots `L_ii²`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
    pivots: Vec<f64>,
}

impl Cholesky {
    /// Factors a symmetric matrix. A pivot at or below `rel_tol · max(diag)` is
    /// reported as a loss of positive definiteness.
    pub fn new(a: &Matrix, rel_tol: f64) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(crate::error::invalid("Cholesky needs a square matrix"));
        }
        let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut l = Matrix::zeros(n, n);
        let mut pivots = Vec::with_capacity(n);
        for j in 0..n {
            let lj = l.row(j)[..j].to_vec();
            let pivot = a[(j, j)] - dot(&lj, &lj);
            if !(pivot > rel_tol * scale) {
                return Err(Error::NotPositiveDefinite { row: j, pivot });
            }
            pivots.push(pivot);
            let d = pivot.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let s = a[(i, j)] - dot(&l.row(i)[..j], &lj);
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { lower: l, pivots })
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    /// Ratio of the largest to the smallest pivot.
    pub fn pivot_ratio(&self) -> f64 {
        let max = self.pivots.iter().cloned().fold(0.0, f64::max);
        let min = self.pivots.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `L · z`
    pub fn lower_mul(&self, z: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        (0..n).map(|i| dot(&self.lower.row(i)[..=i], &z[..=i])).collect()
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&self.lower.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / self.lower[(i, i)];
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            x[i] /= self.lower[(i, i)];
            let xi = x[i];
            for (k, lik) in self.lower.row(i)[..i].iter().enumerate() {
                x[k] -= lik * xi;
            }
        }
        x
    }

    /// `L^{-T}` as an upper-triangular matrix.
    pub fn inverse_transpose(&self) -> Matrix {
        let n = self.pivots.len();
        let mut inv = Matrix::zeros(n, n);
        // Column j of L^{-T} is L^{-T} e_j; only its first j+1 entries are nonzero.
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve_upper(&e);
            for (i, &v) in col.iter().enumerate().take(j + 1) {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// Outcome of a ridge least-squares solve.
#[derive(Debug, Clone)]
pub struct RidgeSolution {
    pub coefficients: Vec<f64>,
    /// Ridge actually used after any escalation.
    pub ridge: f64,
    /// Smallest over largest |R_ii| of the QR factor.
    pub rcond: f64,
}

/// Minimizes `|A c - b|² + ridge·|c|²` by Householder QR of the augmented system.
/// Returns `None` when the triangular factor is numerically singular.
pub fn ridge_least_squares(a: &Matrix, b: &[f64], ridge: f64, min_rcond: f64) -> Option<RidgeSolution> {
    let (m, n) = (a.rows(), a.cols());
    let extra = if ridge > 0.0 { n } else { 0 };
    let rows = m + extra;
    // Column-major working copy.
    let mut w: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col: Vec<f64> = (0..m).map(|i| a[(i, j)]).collect();
            col.resize(rows, 0.0);
            if extra > 0 {
                col[m + j] = ridge.sqrt();
            }
            col
        })
        .collect();
    let mut rhs = b.to_vec();
    rhs.resize(rows, 0.0);
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let norm = w[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if w[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = w[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            for col in w.iter_mut().skip(k + 1) {
                let s = dot(&v, &col[k..]) * 2.0 / vnorm2;
                for (c, vi) in col[k..].iter_mut().zip(&v) {
                    *c -= s * vi;
                }
            }
            let s = dot(&v, &rhs[k..]) * 2.0 / vnorm2;
            for (c, vi) in rhs[k..].iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
    }
    let max = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let min = diag.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    let rcond = if max > 0.0 { min / max } else { 0.0 };
    if !(rcond > min_rcond) {
        return None;
    }
    let mut c = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= w[j][i] * c[j];
        }
        c[i] = s / diag[i];
    }
    Some(RidgeSolution { coefficients: c, ridge, rcond })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_reconstructs_spd_matrix() {
        let a = Matrix::from_fn(4, 4, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + if i == j { 1.0 } else { 0.0 });
        let ch = Cholesky::new(&a, 1e-14).unwrap();
        let l = ch.lower();
        let back = l.matmul(&l.transpose());
        assert!(back.max_abs_diff(&a) < 1e-14);
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = ch.solve_upper(&ch.solve_lower(&b));
        let ax = a.mul_vec(&x);
        for (p, q) in ax.iter().zip(&b) {
            assert_relative_eq!(p, q, epsilon = 1e-13);
        }
        let inv_t = ch.inverse_transpose();
        let should_be_identity = l.transpose().matmul(&inv_t);
        assert!(should_be_identity.max_abs_diff(&Matrix::identity(4)) < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(Cholesky::new(&a, 1e-14), Err(Error::NotPositiveDefinite { row: 1, .. })));
    }

    #[test]
    fn ridge_solution_matches_normal_equations() {
        let a = Matrix::from_fn(6, 3, |i, j| ((i * 3 + j) as f64).sin());
        let b: Vec<f64> = (0..6).map(|i| i as f64 * 0.3 - 1.0).collect();
        let ridge = 0.25;
        let sol = ridge_least_squares(&a, &b, ridge, 1e-15).unwrap();
        let mut normal = a.transpose().matmul(&a);
        for i in 0..3 {
            normal[(i, i)] += ridge;
        }
        let rhs = a.tr_mul_vec(&b);
        let ch = Cholesky::new(&normal, 1e-14).unwrap();
        let expect = ch.solve_upper(&ch.solve_lower(&rhs));
        for (p, q) in sol.coefficients.iter().zip(&expect) {
            assert_relative_eq!(p, q, epsilon = 1e-12);
        }
    }
}
