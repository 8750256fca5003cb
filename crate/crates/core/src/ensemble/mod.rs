//! The Gaussian ensemble of real homogeneous polynomials induced by the
//! `L²(S^N)` inner product.
//!
//! Two interchangeable orthonormal bases realize the ensemble:
//!
//! * [`MonomialBasis`]: exact Gram matrix of the monomials followed by a
//!   Cholesky whitening. Works for every `N` while the Gram matrix stays well
//!   conditioned (roughly `m ≤ 30` for `N ≤ 2`, `m ≤ 20` for `N = 3`).
//! * [`HarmonicBasis`]: the explicit real spherical-harmonic basis on `S^1` and
//!   `S^2`, stable for any degree.
//!
//! Both produce the same law: coefficients in an orthonormal basis are
//! independent standard Gaussians ([`COEFFICIENT_VARIANCE`] = 1).

mod harmonic;
mod monomial;

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::math::{binomial, harmonic_dimension, ln_gamma, normalized_gegenbauer, sphere_area};

pub use harmonic::{HarmonicBasis, HarmonicPolynomial};
pub use monomial::{gram_matrix, sample_polynomial_tuple, whitening, HomogeneousPolynomial, MonomialBasis, WhiteningFactor};

/// Variance of each coefficient in an orthonormal basis. The density
/// `exp(-|P|²)` would give 1/2; a global scale leaves every zero set unchanged.
pub const COEFFICIENT_VARIANCE: f64 = 1.0;

/// Pivot ratio above which the monomial whitening is refused.
pub const MAX_PIVOT_RATIO: f64 = 1e12;

/// Largest tolerated entry of `TᵀGT - I` on the probed columns.
pub const MAX_WHITENING_RESIDUAL: f64 = 1e-8;

/// Dimensions of the model: `N` (ambient projective dimension), `m` (degree),
/// `r` (number of equations) and `n` (dimension of the linear subvariety).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleSpec {
    pub ambient_dim: usize,
    pub degree: usize,
    pub codim: usize,
    pub variety_dim: usize,
}

impl EnsembleSpec {
    pub fn new(ambient_dim: usize, degree: usize, codim: usize, variety_dim: usize) -> Result<Self> {
        if ambient_dim < 1 {
            return Err(invalid("ambient dimension N must be at least 1"));
        }
        if degree < 1 {
            return Err(invalid("degree m must be at least 1"));
        }
        if variety_dim < 1 || variety_dim > ambient_dim {
            return Err(invalid("variety dimension n must lie in [1, N]"));
        }
        if codim < 1 || codim > variety_dim {
            return Err(invalid("codimension r must lie in [1, n]"));
        }
        Ok(Self { ambient_dim, degree, codim, variety_dim })
    }

    /// Hypersurfaces of `P^N` itself: `n = N`, `r = 1`.
    pub fn hypersurface(ambient_dim: usize, degree: usize) -> Result<Self> {
        Self::new(ambient_dim, degree, 1, ambient_dim)
    }

    /// Number of variables `N + 1`.
    pub fn variables(&self) -> usize {
        self.ambient_dim + 1
    }

    /// `d_m = C(N + m, m)`.
    pub fn dimension(&self) -> usize {
        binomial(self.ambient_dim + self.degree, self.degree)
    }

    /// Harmonic degrees `l ≤ m` with `l ≡ m (mod 2)`.
    pub fn harmonic_degrees(&self) -> impl Iterator<Item = usize> {
        let m = self.degree;
        (m % 2..=m).step_by(2)
    }
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: &[i64]) -> Result<Self> {
        if exponents.iter().any(|&e| e < 0) {
            return Err(invalid("multi-index exponents must be nonnegative"));
        }
        Ok(Self(exponents.iter().map(|&e| e as u32).collect()))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// All exponent vectors of `vars` variables summing to `degree`, in
    /// ascending lexicographic order.
    pub fn all(vars: usize, degree: usize) -> Vec<MultiIndex> {
        fn rec(prefix: &mut Vec<u32>, left: u32, vars: usize, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == vars {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=left {
                prefix.push(e);
                rec(prefix, left - e, vars, out);
                prefix.pop();
            }
        }
        let mut out = Vec::with_capacity(binomial(vars - 1 + degree, degree));
        rec(&mut Vec::with_capacity(vars), degree as u32, vars, &mut out);
        out
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// `∫_{S^N} x^α dσ` for the round measure.
///
/// Zero as soon as one exponent is odd; otherwise
/// `2 Π Γ(β_i + 1/2) / Γ(|β| + (N+1)/2)` with `α = 2β`.
pub fn sphere_moment(alpha: &MultiIndex, ambient_dim: usize) -> Result<f64> {
    if alpha.exponents().len() != ambient_dim + 1 {
        return Err(invalid("multi-index length must be N + 1"));
    }
    if alpha.exponents().iter().any(|e| e % 2 == 1) {
        return Ok(0.0);
    }
    let half: Vec<f64> = alpha.exponents().iter().map(|&e| (e / 2) as f64).collect();
    let total: f64 = half.iter().sum();
    let log = half.iter().map(|b| ln_gamma(b + 0.5)).sum::<f64>() - ln_gamma(total + (ambient_dim as f64 + 1.0) / 2.0);
    Ok(2.0 * log.exp())
}

/// Covariance of the ensemble through the addition theorem:
/// `K_m(x, y) = Σ_{l ≡ m} dim H_l / |S^N| · G_l(⟨x, y⟩)`.
///
/// Independent of any basis; used as a cross-check of the basis sums and as the
/// fast path for kernel studies at high degree.
pub fn zonal_covariance(spec: &EnsembleSpec, x: &[f64], y: &[f64]) -> f64 {
    let t = crate::linalg::dot(x, y).clamp(-1.0, 1.0);
    zonal_covariance_at(spec, t)
}

/// [`zonal_covariance`] as a function of `t = ⟨x, y⟩`.
pub fn zonal_covariance_at(spec: &EnsembleSpec, t: f64) -> f64 {
    let n = spec.ambient_dim;
    let mut g = vec![0.0; spec.degree + 1];
    normalized_gegenbauer(n, t, &mut g);
    let sum: f64 = spec.harmonic_degrees().map(|l| harmonic_dimension(n, l) as f64 * g[l]).sum();
    COEFFICIENT_VARIANCE * sum / sphere_area(n)
}

/// Which orthonormal basis realizes the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BasisKind {
    /// Harmonic for `N ≤ 2`, monomial otherwise.
    #[default]
    Auto,
    Monomial,
    Harmonic,
}

#[derive(Debug, Clone)]
pub enum Basis {
    Monomial(MonomialBasis),
    Harmonic(HarmonicBasis),
}

/// The Gaussian measure `μ_m` together with a concrete orthonormal basis.
#[derive(Debug, Clone)]
pub struct Ensemble {
    basis: Basis,
}

impl Ensemble {
    pub fn new(spec: EnsembleSpec, kind: BasisKind) -> Result<Self> {
        let basis = match kind {
            BasisKind::Monomial => Basis::Monomial(MonomialBasis::new(spec)?),
            BasisKind::Harmonic => Basis::Harmonic(HarmonicBasis::new(spec)?),
            BasisKind::Auto if spec.ambient_dim <= 2 => Basis::Harmonic(HarmonicBasis::new(spec)?),
            BasisKind::Auto => Basis::Monomial(MonomialBasis::new(spec)?),
        };
        Ok(Self { basis })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        match &self.basis {
            Basis::Monomial(b) => b.spec(),
            Basis::Harmonic(b) => b.spec(),
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn kind(&self) -> BasisKind {
        match self.basis {
            Basis::Monomial(_) => BasisKind::Monomial,
            Basis::Harmonic(_) => BasisKind::Harmonic,
        }
    }

    /// Values of the orthonormal basis at the unit vector `x`.
    pub fn basis_values(&self, x: &[f64]) -> Vec<f64> {
        match &self.basis {
            Basis::Monomial(b) => b.basis_values(x),
            Basis::Harmonic(b) => b.basis_values(x),
        }
    }

    /// `Σ_i P_i(x) P_i(y)` over the orthonormal basis.
    pub fn covariance_exact(&self, x: &[f64], y: &[f64]) -> f64 {
        let bx = self.basis_values(x);
        let by = self.basis_values(y);
        COEFFICIENT_VARIANCE * crate::linalg::dot(&bx, &by)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RandomPolynomial {
        match &self.basis {
            Basis::Monomial(b) => RandomPolynomial::Monomial(b.sample(rng)),
            Basis::Harmonic(b) => RandomPolynomial::Harmonic(b.sample(rng)),
        }
    }

    /// `r` independent draws, taken in order from the same stream.
    pub fn sample_tuple<R: Rng + ?Sized>(&self, r: usize, rng: &mut R) -> Vec<RandomPolynomial> {
        (0..r).map(|_| self.sample(rng)).collect()
    }
}

/// One draw of the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomPolynomial {
    Monomial(HomogeneousPolynomial),
    Harmonic(HarmonicPolynomial),
}

impl RandomPolynomial {
    pub fn spec(&self) -> &EnsembleSpec {
        match self {
            RandomPolynomial::Monomial(p) => p.spec(),
            RandomPolynomial::Harmonic(p) => p.spec(),
        }
    }

    /// Value at a unit vector of `R^{N+1}`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            RandomPolynomial::Monomial(p) => p.evaluate(x),
            RandomPolynomial::Harmonic(p) => p.evaluate(x),
        }
    }

    /// Coefficients in the basis they were drawn in.
    pub fn coefficients(&self) -> &[f64] {
        match self {
            RandomPolynomial::Monomial(p) => p.coefficients(),
            RandomPolynomial::Harmonic(p) => p.coefficients(),
        }
    }
}

impl crate::func::SphereFunction for RandomPolynomial {
    fn ambient_dim(&self) -> usize {
        self.spec().variables()
    }

    fn eval_unit(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }

    fn homogeneous_degree(&self) -> Option<usize> {
        Some(self.spec().degree)
    }
}
