//! Samples of the limit Gaussian field, whose covariance is the limit kernel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::func::ScalarField;
use crate::kernel::{limit_kernel, LimitKernelSpec};
use crate::linalg::{Cholesky, Matrix};
use crate::math::unit_ball_volume;
use crate::rng::{standard_normal, uniform_in_ball};

/// Default number of spectral frequencies.
pub const DEFAULT_FREQUENCIES: usize = 512;

/// Largest grid accepted by the exact sampler.
pub const MAX_EXACT_POINTS: usize = 10_000;

/// Jitter multiples of `K(0, 0)` tried in turn by the exact sampler.
pub const JITTER_LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// A cubical grid of `resolution^n` vertices on `center + [-R, R]^n`.
///
/// Vertices are numbered with the first axis running fastest.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(center: Vec<f64>, radius: f64, resolution: usize) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("grid needs at least one axis"));
        }
        if resolution < 3 {
            return Err(invalid("grid resolution must be at least 3"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("grid radius must be positive"));
        }
        Ok(Self { center, radius, resolution })
    }

    /// Grid centred at the origin of `R^dim`.
    pub fn centered(dim: usize, radius: f64, resolution: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], radius, resolution)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `h = 2R / (resolution - 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.resolution - 1) as f64
    }

    /// Total number of vertices.
    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of vertex `i` along `axis`.
    pub fn axis_coordinate(&self, axis: usize, i: usize) -> f64 {
        self.center[axis] - self.radius + i as f64 * self.spacing()
    }

    /// Per-axis indices of vertex `index`.
    pub fn unravel(&self, mut index: usize, out: &mut [usize]) {
        for o in out.iter_mut() {
            *o = index % self.resolution;
            index /= self.resolution;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * self.resolution + i)
    }

    pub fn point(&self, index: usize, out: &mut [f64]) {
        let mut rem = index;
        for (axis, o) in out.iter_mut().enumerate() {
            *o = self.axis_coordinate(axis, rem % self.resolution);
            rem /= self.resolution;
        }
    }

    /// The same grid with its center moved by `shift`.
    pub fn shifted(&self, shift: &[f64]) -> GridSpec {
        let center = self.center.iter().zip(shift).map(|(c, s)| c + s).collect();
        GridSpec { center, radius: self.radius, resolution: self.resolution }
    }
}

/// Randomized spectral realization
/// `F(x) = a Σ_j cos(⟨ξ_j, x⟩ + φ_j)`, `a = sqrt(2 vol(B_N) / M)`,
/// with `ξ_j` uniform in the unit ball of `R^N` and `φ_j` uniform on `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralFieldSample {
    pub spec: LimitKernelSpec,
    /// Row-major `M × N`.
    pub frequencies: Vec<f64>,
    pub phases: Vec<f64>,
    pub amplitude: f64,
}

impl SpectralFieldSample {
    pub fn frequency_count(&self) -> usize {
        self.phases.len()
    }

    pub fn frequency(&self, j: usize) -> &[f64] {
        let n = self.spec.freq_dim;
        &self.frequencies[j * n..(j + 1) * n]
    }
}

impl ScalarField for SpectralFieldSample {
    fn dim(&self) -> usize {
        self.spec.eval_dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (j, phi) in self.phases.iter().enumerate() {
            let xi = self.frequency(j);
            let arg: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() + phi;
            acc += arg.cos();
        }
        self.amplitude * acc
    }

    /// Separable evaluation: `cos(Σ_k ξ_k x_k + φ)` is the real part of a product
    /// of per-axis complex exponentials.
    fn eval_grid(&self, grid: &GridSpec) -> Vec<f64> {
        let n = grid.dim();
        let res = grid.resolution;
        let mut out = vec![0.0; grid.len()];
        let mut axis_exp = vec![(0.0, 0.0); n * res];
        for (j, phi) in self.phases.iter().enumerate() {
            let xi = self.frequency(j);
            for k in 0..n {
                for i in 0..res {
                    let (s, c) = (xi[k] * grid.axis_coordinate(k, i)).sin_cos();
                    axis_exp[k * res + i] = (c, s);
                }
            }
            let (s, c) = phi.sin_cos();
            accumulate(&axis_exp, res, n - 1, (c, s), 0, &mut out);
        }
        out.iter_mut().for_each(|v| *v *= self.amplitude);
        out
    }
}

fn accumulate(axis_exp: &[(f64, f64)], res: usize, axis: usize, acc: (f64, f64), base: usize, out: &mut [f64]) {
    let stride = res.pow(axis as u32);
    for i in 0..res {
        let (er, ei) = axis_exp[axis * res + i];
        let z = (acc.0 * er - acc.1 * ei, acc.0 * ei + acc.1 * er);
        if axis == 0 {
            out[base + i] += z.0;
        } else {
            accumulate(axis_exp, res, axis - 1, z, base + i * stride, out);
        }
    }
}

/// Draws a spectral realization with `frequency_count` frequencies.
pub fn sample_field_spectral<R: Rng + ?Sized>(
    spec: &LimitKernelSpec,
    frequency_count: usize,
    rng: &mut R,
) -> Result<SpectralFieldSample> {
    if frequency_count == 0 {
        return Err(invalid("spectral sampler needs at least one frequency"));
    }
    let n = spec.freq_dim;
    let mut frequencies = vec![0.0; frequency_count * n];
    let mut phases = Vec::with_capacity(frequency_count);
    for j in 0..frequency_count {
        uniform_in_ball(rng, &mut frequencies[j * n..(j + 1) * n]);
        let u: f64 = rng.random();
        phases.push(2.0 * PI * u);
    }
    let amplitude = (2.0 * unit_ball_volume(n) / frequency_count as f64).sqrt();
    Ok(SpectralFieldSample { spec: *spec, frequencies, phases, amplitude })
}

/// `r` independent realizations drawn in order from one stream.
pub fn sample_field_tuple<R: Rng + ?Sized>(
    spec: &LimitKernelSpec,
    frequency_count: usize,
    r: usize,
    rng: &mut R,
) -> Result<Vec<SpectralFieldSample>> {
    (0..r).map(|_| sample_field_spectral(spec, frequency_count, rng)).collect()
}

/// An exact Gaussian vector with covariance `K(p_i, p_j) + jitter·K(0,0)·I`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExactSample {
    pub values: Vec<f64>,
    /// Relative jitter that made the kernel matrix factorizable.
    pub jitter: f64,
}

/// Factor of the jittered kernel matrix on `points`.
pub fn kernel_factor(spec: &LimitKernelSpec, points: &[Vec<f64>]) -> Result<(Cholesky, f64)> {
    let k = points.len();
    if k > MAX_EXACT_POINTS {
        return Err(invalid("exact sampler is limited to 10^4 points"));
    }
    let k0 = unit_ball_volume(spec.freq_dim);
    let base = Matrix::from_fn(k, k, |i, j| limit_kernel(spec, &points[i], &points[j]));
    let mut last = 0.0;
    for &jitter in &JITTER_LADDER {
        last = jitter;
        let mut a = base.clone();
        for i in 0..k {
            a[(i, i)] += jitter * k0;
        }
        if let Ok(ch) = Cholesky::new(&a, 0.0) {
            return Ok((ch, jitter));
        }
    }
    Err(Error::JitterExhausted { jitter: last })
}

/// Exact sample at arbitrary points.
pub fn sample_field_exact<R: Rng + ?Sized>(spec: &LimitKernelSpec, points: &[Vec<f64>], rng: &mut R) -> Result<ExactSample> {
    let (ch, jitter) = kernel_factor(spec, points)?;
    let z: Vec<f64> = (0..points.len()).map(|_| standard_normal(rng)).collect();
    Ok(ExactSample { values: ch.lower_mul(&z), jitter })
}

/// Exact sample on every vertex of `grid`.
pub fn sample_field_exact_grid<R: Rng + ?Sized>(grid: &GridSpec, spec: &LimitKernelSpec, rng: &mut R) -> Result<ExactSample> {
    if grid.dim() != spec.eval_dim {
        return Err(invalid("grid dimension must equal the kernel evaluation dimension"));
    }
    if grid.len() > MAX_EXACT_POINTS {
        return Err(invalid("exact sampler is limited to 10^4 points"));
    }
    let mut p = vec![0.0; grid.dim()];
    let points: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| {
            grid.point(i, &mut p);
            p.clone()
        })
        .collect();
    sample_field_exact(spec, &points, rng)
}
