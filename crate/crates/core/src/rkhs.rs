//! Approximation by finite combinations of kernel translates `K_v(x) = K(x, v)`:
//! mollified monomials and ridge least-squares fits in the span.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ensemble::MultiIndex;
use crate::error::{invalid, Error, Result};
use crate::field::GridSpec;
use crate::func::ScalarField;
use crate::kernel::{limit_kernel, LimitKernelSpec};
use crate::linalg::{ridge_least_squares, Matrix};
use crate::math::sphere_area;
use crate::quadrature::{gauss_legendre, integrate};

/// Largest tensor rule accepted by [`MollifierQuadrature`].
pub const QUADRATURE_BUDGET: usize = 4_000_000;

/// Smallest accepted `|R_ii|` ratio in the least-squares QR factor.
pub const MIN_RCOND: f64 = 1e-13;

/// Ridge values tried after the requested one, relative to the largest squared
/// column norm.
pub const RIDGE_LADDER: [f64; 6] = [1e-24, 1e-20, 1e-16, 1e-12, 1e-8, 1e-4];

/// `x ↦ K(x, v)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelTranslate {
    pub center: Vec<f64>,
    pub spec: LimitKernelSpec,
}

impl ScalarField for KernelTranslate {
    fn dim(&self) -> usize {
        self.spec.eval_dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        limit_kernel(&self.spec, x, &self.center)
    }
}

fn bump(rho2: f64) -> f64 {
    if rho2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - rho2)).exp()
    }
}

/// `φ_t(ξ) = t^{-N} φ(ξ/t)` for the normalized bump `φ ∝ exp(-1/(1-|ξ|²))` on
/// the unit ball of `R^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mollifier {
    pub freq_dim: usize,
    pub scale: f64,
    /// `∫ exp(-1/(1-|ξ|²)) dξ` over the unit ball.
    normalization: f64,
}

impl Mollifier {
    pub fn new(freq_dim: usize, scale: f64) -> Result<Self> {
        if freq_dim == 0 || !(scale > 0.0 && scale <= 1.0) {
            return Err(invalid("mollifier needs N ≥ 1 and t ∈ (0, 1]"));
        }
        let radial = integrate(|r| Ok(bump(r * r) * r.powi(freq_dim as i32 - 1)), 0.0, 1.0, 1e-15, 1_000_000)?;
        Ok(Self { freq_dim, scale, normalization: sphere_area(freq_dim - 1) * radial })
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let t = self.scale;
        let rho2: f64 = xi.iter().map(|v| (v / t) * (v / t)).sum();
        bump(rho2) / (self.normalization * t.powi(self.freq_dim as i32))
    }
}

/// Tensor Gauss–Legendre rule for `∫ φ_t(ξ) cos⟨ξ, x⟩ dξ` over the support.
#[derive(Debug, Clone)]
pub struct MollifierQuadrature {
    mollifier: Mollifier,
    /// Nodes of the unit ball, flattened with stride `N`.
    nodes: Vec<f64>,
    /// Weights times the profile, rescaled to unit total mass.
    weights: Vec<f64>,
    /// Raw rule mass minus one, before rescaling.
    mass_defect: f64,
}

impl MollifierQuadrature {
    pub fn new(mollifier: Mollifier, per_axis: usize) -> Result<Self> {
        let dim = mollifier.freq_dim;
        let total = per_axis.checked_pow(dim as u32).filter(|&t| t <= QUADRATURE_BUDGET);
        let Some(total) = total else {
            return Err(Error::QuadratureBudget { tol: 0.0, budget: QUADRATURE_BUDGET });
        };
        let (x, w) = gauss_legendre(per_axis);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; dim];
        for flat in 0..total {
            let mut rem = flat;
            for i in idx.iter_mut() {
                *i = rem % per_axis;
                rem /= per_axis;
            }
            let rho2: f64 = idx.iter().map(|&i| x[i] * x[i]).sum();
            let b = bump(rho2);
            if b > 0.0 {
                nodes.extend(idx.iter().map(|&i| x[i]));
                weights.push(idx.iter().map(|&i| w[i]).product::<f64>() * b / mollifier.normalization);
            }
        }
        let mass: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= mass);
        Ok(Self { mollifier, nodes, weights, mass_defect: mass - 1.0 })
    }

    /// Quadrature error of the unnormalized rule on the profile itself.
    pub fn mass_defect(&self) -> f64 {
        self.mass_defect
    }

    pub fn mollifier(&self) -> &Mollifier {
        &self.mollifier
    }

    /// `∫ φ_t(ξ) cos⟨ξ, x⟩ dξ` for `x ∈ R^n` embedded in the first coordinates.
    pub fn fourier(&self, x: &[f64]) -> f64 {
        let dim = self.mollifier.freq_dim;
        let t = self.mollifier.scale;
        self.weights
            .iter()
            .zip(self.nodes.chunks(dim))
            .map(|(w, eta)| w * (t * x.iter().zip(eta).map(|(a, b)| a * b).sum::<f64>()).cos())
            .sum()
    }

    /// `x^k ∫ φ_t(ξ) cos⟨ξ, x⟩ dξ`, which tends to `x^k` as `t → 0`.
    pub fn approximant(&self, k: &MultiIndex, x: &[f64]) -> f64 {
        let mono: f64 = k.exponents().iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product();
        mono * self.fourier(x)
    }
}

/// The mollified monomial `x^k ∫ φ_t(ξ) cos⟨ξ, x⟩ dξ` with `per_axis` nodes per
/// frequency axis.
pub fn mollifier_approximant(k: &MultiIndex, t: f64, freq_dim: usize, x: &[f64], per_axis: usize) -> Result<f64> {
    if k.exponents().len() != x.len() || x.len() > freq_dim {
        return Err(invalid("multi-index, point and frequency dimensions disagree"));
    }
    let q = MollifierQuadrature::new(Mollifier::new(freq_dim, t)?, per_axis)?;
    Ok(q.approximant(k, x))
}

/// A least-squares fit in the span of kernel translates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpanFit {
    pub centers: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    /// Ridge actually used.
    pub ridge: f64,
    pub rcond: f64,
    /// Sup residual over the fitting points.
    pub fit_residual: f64,
    /// Sup residual over the ball points of the grid refined to `2ρ - 1`.
    pub audit_residual: f64,
}

impl SpanFit {
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval(&self, spec: &LimitKernelSpec, x: &[f64]) -> f64 {
        self.centers.iter().zip(&self.coefficients).map(|(v, c)| c * limit_kernel(spec, x, v)).sum()
    }
}

fn ball_points(grid: &GridSpec) -> Vec<Vec<f64>> {
    let mut p = vec![0.0; grid.dim()];
    let r2 = grid.radius * grid.radius * (1.0 + 1e-12);
    (0..grid.len())
        .filter_map(|i| {
            grid.point(i, &mut p);
            let d2: f64 = p.iter().zip(&grid.center).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2 <= r2).then(|| p.clone())
        })
        .collect()
}

/// Ridge least squares of `target` against `{K_v : v ∈ centers}` on the grid
/// points inside `B(center, R)`.
///
/// The requested ridge is escalated along [`RIDGE_LADDER`] while the system is
/// numerically singular.
pub fn fit_in_span(
    target: &impl ScalarField,
    centers: &[Vec<f64>],
    spec: &LimitKernelSpec,
    ridge: f64,
    grid: &GridSpec,
) -> Result<SpanFit> {
    let n = spec.eval_dim;
    if target.dim() != n || grid.dim() != n || centers.is_empty() || centers.iter().any(|c| c.len() != n) {
        return Err(invalid("target, grid, centers and kernel must share the dimension n"));
    }
    if !(ridge >= 0.0) {
        return Err(invalid("ridge must be nonnegative"));
    }
    for i in 0..centers.len() {
        if centers[..i].iter().any(|c| c == &centers[i]) {
            return Err(invalid("centers must be distinct"));
        }
    }
    let points = ball_points(grid);
    let a = Matrix::from_fn(points.len(), centers.len(), |i, j| limit_kernel(spec, &points[i], &centers[j]));
    let b: Vec<f64> = points.iter().map(|p| target.eval(p)).collect();
    let scale = (0..a.cols()).map(|j| (0..a.rows()).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>()).fold(0.0, f64::max);
    let ladder = core::iter::once(ridge).chain(RIDGE_LADDER.iter().map(|r| r * scale).filter(|&r| r > ridge));
    let mut last = ridge;
    let mut solution = None;
    for lambda in ladder {
        last = lambda;
        if let Some(s) = ridge_least_squares(&a, &b, lambda, MIN_RCOND) {
            solution = Some(s);
            break;
        }
    }
    let sol = solution.ok_or(Error::RidgeExhausted { ridge: last })?;
    let mut fit = SpanFit {
        centers: centers.to_vec(),
        coefficients: sol.coefficients,
        ridge: sol.ridge,
        rcond: sol.rcond,
        fit_residual: 0.0,
        audit_residual: 0.0,
    };
    fit.fit_residual = points.iter().zip(&b).map(|(p, y)| (y - fit.eval(spec, p)).abs()).fold(0.0, f64::max);
    let audit = GridSpec::new(grid.center.clone(), grid.radius, 2 * grid.resolution - 1)?;
    fit.audit_residual = ball_points(&audit).iter().map(|p| (target.eval(p) - fit.eval(spec, p)).abs()).fold(0.0, f64::max);
    Ok(fit)
}
