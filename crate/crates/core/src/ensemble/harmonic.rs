use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::{EnsembleSpec, COEFFICIENT_VARIANCE};
use crate::error::{invalid, Result};
use crate::rng::standard_normal;

/// Real spherical harmonics of degree `l ≡ m (mod 2)`, `l ≤ m`, each lifted to
/// a homogeneous polynomial of degree `m` by the factor `|x|^{m-l}`.
///
/// Ordering: `l` ascending; within `l`, order 0 then `(cos, sin)` pairs for
/// orders `1..=l` (for `N = 1`, the pair for order `l` alone).
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    spec: EnsembleSpec,
}

impl HarmonicBasis {
    pub fn new(spec: EnsembleSpec) -> Result<Self> {
        if spec.ambient_dim > 2 {
            return Err(invalid("harmonic basis is implemented for N = 1 and N = 2 only"));
        }
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    /// Basis values at any point of `R^{N+1}`; orthonormal on the unit sphere.
    pub fn basis_values(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.spec.dimension()];
        harmonic_values(&self.spec, x, &mut out);
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HarmonicPolynomial {
        let sd = COEFFICIENT_VARIANCE.sqrt();
        let coeffs = (0..self.spec.dimension()).map(|_| sd * standard_normal(rng)).collect();
        HarmonicPolynomial { spec: self.spec, coeffs }
    }
}

/// A polynomial given by its coefficients in [`HarmonicBasis`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HarmonicPolynomial {
    spec: EnsembleSpec,
    coeffs: Vec<f64>,
}

impl HarmonicPolynomial {
    pub fn new(spec: EnsembleSpec, coeffs: Vec<f64>) -> Result<Self> {
        HarmonicBasis::new(spec)?;
        if coeffs.len() != spec.dimension() {
            return Err(invalid("coefficient vector length must equal d_m"));
        }
        Ok(Self { spec, coeffs })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Homogeneous of degree `m` on all of `R^{N+1}`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut buf = vec![0.0; self.coeffs.len()];
        harmonic_values(&self.spec, x, &mut buf);
        crate::linalg::dot(&self.coeffs, &buf)
    }
}

fn harmonic_values(spec: &EnsembleSpec, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(x.len(), spec.variables());
    match spec.ambient_dim {
        1 => circle_values(spec.degree, x, out),
        2 => sphere_values(spec.degree, x, out),
        _ => unreachable!("checked at construction"),
    }
}

/// `(ρ²)^k` for `k = 0..=m/2`.
fn rho_powers(rho2: f64, m: usize) -> Vec<f64> {
    let mut p = vec![1.0; m / 2 + 1];
    for k in 1..p.len() {
        p[k] = p[k - 1] * rho2;
    }
    p
}

fn circle_values(m: usize, x: &[f64], out: &mut [f64]) {
    let (a, b) = (x[0], x[1]);
    let lift = rho_powers(a * a + b * b, m);
    let c0 = 1.0 / (2.0 * PI).sqrt();
    let c = 1.0 / PI.sqrt();
    // (re, im) of (a + ib)^k
    let (mut re, mut im) = (1.0, 0.0);
    let mut idx = 0;
    for k in 0..=m {
        if k > 0 {
            let next = re * a - im * b;
            im = re * b + im * a;
            re = next;
        }
        if k % 2 != m % 2 {
            continue;
        }
        let s = lift[(m - k) / 2];
        if k == 0 {
            out[idx] = c0 * s;
            idx += 1;
        } else {
            out[idx] = c * re * s;
            out[idx + 1] = c * im * s;
            idx += 2;
        }
    }
}

fn sphere_values(m: usize, x: &[f64], out: &mut [f64]) {
    let (a, b, t) = (x[0], x[1], x[2]);
    let rho2 = a * a + b * b + t * t;
    let lift = rho_powers(rho2, m);
    let c0 = 1.0 / (2.0 * PI).sqrt();
    let c = 1.0 / PI.sqrt();

    // Offsets of each retained degree.
    let mut offset = vec![usize::MAX; m + 1];
    let mut acc = 0;
    for l in (m % 2..=m).step_by(2) {
        offset[l] = acc;
        acc += 2 * l + 1;
    }

    // Order loop outermost; q runs the degree recurrence for fixed order.
    let (mut wr, mut wi) = (1.0, 0.0);
    let mut qmm = core::f64::consts::FRAC_1_SQRT_2;
    for ord in 0..=m {
        if ord > 0 {
            let next = wr * a - wi * b;
            wi = wr * b + wi * a;
            wr = next;
            qmm *= ((2 * ord + 1) as f64 / (2 * ord) as f64).sqrt();
        }
        let mf = ord as f64;
        let mut q_prev2 = 0.0;
        let mut q_prev = qmm;
        for l in ord..=m {
            let q = if l == ord {
                qmm
            } else if l == ord + 1 {
                (2.0 * mf + 3.0).sqrt() * t * qmm
            } else {
                let lf = l as f64;
                let aa = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let l1 = lf - 1.0;
                let bb = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
                aa * (t * q_prev - bb * rho2 * q_prev2)
            };
            if l > ord {
                q_prev2 = q_prev;
                q_prev = q;
            }
            if l % 2 != m % 2 {
                continue;
            }
            let base = offset[l];
            let s = lift[(m - l) / 2];
            if ord == 0 {
                out[base] = c0 * q * s;
            } else {
                out[base + 2 * ord - 1] = c * q * wr * s;
                out[base + 2 * ord] = c * q * wi * s;
            }
        }
    }
}
