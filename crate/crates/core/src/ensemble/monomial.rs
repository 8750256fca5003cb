use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{EnsembleSpec, MultiIndex, COEFFICIENT_VARIANCE, MAX_PIVOT_RATIO, MAX_WHITENING_RESIDUAL};
use crate::error::{invalid, Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::math::ln_gamma;
use crate::rng::standard_normal;

/// A homogeneous polynomial stored by its coefficients on the monomials of
/// [`MultiIndex::all`] (ascending lexicographic order).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomogeneousPolynomial {
    spec: EnsembleSpec,
    coeffs: Vec<f64>,
}

impl HomogeneousPolynomial {
    pub fn new(spec: EnsembleSpec, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != spec.dimension() {
            return Err(invalid("coefficient vector length must equal d_m"));
        }
        Ok(Self { spec, coeffs })
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms.
    pub fn from_terms(spec: EnsembleSpec, terms: &[(&[i64], f64)]) -> Result<Self> {
        let indices = MultiIndex::all(spec.variables(), spec.degree);
        let mut coeffs = vec![0.0; indices.len()];
        for (exps, c) in terms {
            let mi = MultiIndex::new(exps)?;
            let pos = indices.binary_search(&mi).map_err(|_| invalid("term is not of degree m in N+1 variables"))?;
            coeffs[pos] += c;
        }
        Ok(Self { spec, coeffs })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at any point of `R^{N+1}` (not only the sphere).
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let powers = power_table(x, self.spec.degree);
        let m1 = self.spec.degree + 1;
        let mut acc = 0.0;
        for_each_monomial(self.spec.variables(), self.spec.degree, |k, exps| {
            let mut term = self.coeffs[k];
            for (i, &e) in exps.iter().enumerate() {
                term *= powers[i * m1 + e as usize];
            }
            acc += term;
        });
        acc
    }
}

fn power_table(x: &[f64], degree: usize) -> Vec<f64> {
    let m1 = degree + 1;
    let mut powers = vec![1.0; x.len() * m1];
    for (i, &xi) in x.iter().enumerate() {
        for e in 1..m1 {
            powers[i * m1 + e] = powers[i * m1 + e - 1] * xi;
        }
    }
    powers
}

/// Visits the monomials in [`MultiIndex::all`] order without allocating them.
fn for_each_monomial(vars: usize, degree: usize, mut f: impl FnMut(usize, &[u32])) {
    let mut exps = vec![0u32; vars];
    let mut k = 0;
    fn rec(pos: usize, left: u32, exps: &mut [u32], k: &mut usize, f: &mut dyn FnMut(usize, &[u32])) {
        if pos + 1 == exps.len() {
            exps[pos] = left;
            f(*k, exps);
            *k += 1;
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(pos + 1, left - e, exps, k, f);
        }
    }
    rec(0, degree as u32, &mut exps, &mut k, &mut f);
}

/// Gram matrix `⟨x^α, x^β⟩_{L²(S^N)}` of the degree-m monomials.
pub fn gram_matrix(spec: &EnsembleSpec) -> Matrix {
    let n = spec.ambient_dim;
    let m = spec.degree;
    let indices = MultiIndex::all(spec.variables(), m);
    // Every even α+β has |β| = m, so the denominator Γ(m + (N+1)/2) is shared.
    let half_gamma: Vec<f64> = (0..=m).map(|b| ln_gamma(b as f64 + 0.5)).collect();
    let denom = ln_gamma(m as f64 + (n as f64 + 1.0) / 2.0);
    let d = indices.len();
    let mut g = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let mut log = -denom;
            let mut odd = false;
            for (a, b) in indices[i].exponents().iter().zip(indices[j].exponents()) {
                let s = a + b;
                if s % 2 == 1 {
                    odd = true;
                    break;
                }
                log += half_gamma[(s / 2) as usize];
            }
            let v = if odd { 0.0 } else { 2.0 * libm::exp(log) };
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Maps standard Gaussian coordinates to monomial coefficients:
/// `Tᵀ G T = I`, hence `T Tᵀ = G⁻¹`.
#[derive(Debug, Clone)]
pub struct WhiteningFactor {
    transform: Matrix,
    pivot_ratio: f64,
}

impl WhiteningFactor {
    pub fn transform(&self) -> &Matrix {
        &self.transform
    }

    /// Pivot ratio of the diagonally scaled Cholesky factorization.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }
}

/// Whitens a symmetric positive definite Gram matrix.
///
/// The matrix is first scaled to unit diagonal, `S = D G D`, then factored
/// `S = L Lᵀ`; the transform is `T = D L^{-T}`.
pub fn whitening(gram: &Matrix) -> Result<WhiteningFactor> {
    let d = gram.rows();
    if d != gram.cols() || !gram.is_symmetric(1e-12 * gram.as_slice().iter().fold(0.0_f64, |a, b| a.max(b.abs()))) {
        return Err(invalid("Gram matrix must be square and symmetric"));
    }
    let mut scale = vec![0.0; d];
    for (i, s) in scale.iter_mut().enumerate() {
        let g = gram[(i, i)];
        if !(g > 0.0) {
            return Err(Error::NotPositiveDefinite { row: i, pivot: g });
        }
        *s = 1.0 / libm::sqrt(g);
    }
    let scaled = Matrix::from_fn(d, d, |i, j| gram[(i, j)] * scale[i] * scale[j]);
    let chol = Cholesky::new(&scaled, 1e-15)?;
    let mut transform = chol.inverse_transpose();
    for i in 0..d {
        for j in i..d {
            transform[(i, j)] *= scale[i];
        }
    }
    Ok(WhiteningFactor { transform, pivot_ratio: chol.pivot_ratio() })
}

/// Max-entry residual of `TᵀGT - I` restricted to the given columns.
fn whitening_residual(gram: &Matrix, t: &Matrix, columns: &[usize]) -> f64 {
    let d = gram.rows();
    let mut worst: f64 = 0.0;
    for &j in columns {
        let tj: Vec<f64> = (0..d).map(|i| t[(i, j)]).collect();
        let g_tj = gram.mul_vec(&tj);
        let col = t.tr_mul_vec(&g_tj);
        for (i, v) in col.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).abs());
        }
    }
    worst
}

/// Orthonormal basis obtained by whitening the monomials.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    spec: EnsembleSpec,
    factor: WhiteningFactor,
}

impl MonomialBasis {
    /// Builds the basis, refusing specs whose whitening would lose precision.
    pub fn new(spec: EnsembleSpec) -> Result<Self> {
        let gram = gram_matrix(&spec);
        let factor = whitening(&gram)?;
        let d = gram.rows();
        let mut probe: Vec<usize> = vec![0, d / 2];
        probe.extend(d.saturating_sub(4)..d);
        probe.sort_unstable();
        probe.dedup();
        let residual = whitening_residual(&gram, factor.transform(), &probe);
        if factor.pivot_ratio() > MAX_PIVOT_RATIO || !(residual <= MAX_WHITENING_RESIDUAL) {
            return Err(Error::IllConditioned { degree: spec.degree, pivot_ratio: factor.pivot_ratio(), residual });
        }
        Ok(Self { spec, factor })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn factor(&self) -> &WhiteningFactor {
        &self.factor
    }

    /// Monomials `x^α` in lexicographic order.
    pub fn monomials(&self, x: &[f64]) -> Vec<f64> {
        let powers = power_table(x, self.spec.degree);
        let m1 = self.spec.degree + 1;
        let mut out = vec![0.0; self.spec.dimension()];
        for_each_monomial(self.spec.variables(), self.spec.degree, |k, exps| {
            out[k] = exps.iter().enumerate().map(|(i, &e)| powers[i * m1 + e as usize]).product();
        });
        out
    }

    /// Orthonormal basis values `Tᵀ m(x)`.
    pub fn basis_values(&self, x: &[f64]) -> Vec<f64> {
        self.factor.transform().tr_mul_vec(&self.monomials(x))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HomogeneousPolynomial {
        let sd = libm::sqrt(COEFFICIENT_VARIANCE);
        let a: Vec<f64> = (0..self.spec.dimension()).map(|_| sd * standard_normal(rng)).collect();
        HomogeneousPolynomial { spec: self.spec, coeffs: self.factor.transform().mul_vec(&a) }
    }

    pub fn covariance_exact(&self, x: &[f64], y: &[f64]) -> f64 {
        COEFFICIENT_VARIANCE * crate::linalg::dot(&self.basis_values(x), &self.basis_values(y))
    }
}

/// `r` independent draws from the monomial-whitened ensemble.
pub fn sample_polynomial_tuple<R: Rng + ?Sized>(basis: &MonomialBasis, r: usize, rng: &mut R) -> Vec<HomogeneousPolynomial> {
    (0..r).map(|_| basis.sample(rng)).collect()
}
