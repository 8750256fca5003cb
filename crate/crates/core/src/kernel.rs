//! Rescaled covariance of the ensemble and its universal limit
//! `K(u, v) = ∫_{B(0,1) ⊂ R^N} e^{i⟨u-v, ξ⟩} dξ`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ensemble::{zonal_covariance, Ensemble, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::dot;
use crate::math::{bessel_j, gamma, unit_ball_volume};
use crate::quadrature::integrate;

/// Below this distance the limit kernel switches to its Taylor series.
pub const SERIES_RADIUS: f64 = 1e-4;

/// Normal coordinates around a point of the equatorial `S^n ⊂ S^N`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChartAtPoint {
    base: Vec<f64>,
    /// `N` orthonormal tangent vectors; the first `n` span the tangent space of `S^n`.
    frame: Vec<Vec<f64>>,
    variety_dim: usize,
}

impl ChartAtPoint {
    /// Chart at `base ∈ S^n ⊂ S^N`, where `S^n` is cut out by the last `N - n`
    /// coordinates vanishing.
    pub fn new(base: &[f64], variety_dim: usize) -> Result<Self> {
        let dim = base.len();
        if dim < 2 || variety_dim == 0 || variety_dim >= dim {
            return Err(invalid("chart needs 1 ≤ n ≤ N and a point of R^{N+1}"));
        }
        let norm = dot(base, base).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("chart base point must be a unit vector"));
        }
        if base[variety_dim + 1..].iter().any(|v| v.abs() > 1e-12) {
            return Err(invalid("chart base point must lie on the equatorial S^n"));
        }
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
        // Gram-Schmidt on e_0..e_n against the base, skipping the most aligned axis.
        let skip = (0..=variety_dim)
            .max_by(|&a, &b| base[a].abs().total_cmp(&base[b].abs()))
            .unwrap_or(0);
        for axis in (0..=variety_dim).filter(|&a| a != skip) {
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            let c = dot(&v, base);
            v.iter_mut().zip(base).for_each(|(vi, bi)| *vi -= c * bi);
            for f in &frame {
                let c = dot(&v, f);
                v.iter_mut().zip(f).for_each(|(vi, fi)| *vi -= c * fi);
            }
            let n = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|vi| *vi /= n);
            frame.push(v);
        }
        for axis in variety_dim + 1..dim {
            let mut v = vec![0.0; dim];
            v[axis] = 1.0;
            frame.push(v);
        }
        Ok(Self { base: base.to_vec(), frame, variety_dim })
    }

    /// Chart at `e_0` with frame `e_1, …, e_N`.
    pub fn north_pole(ambient_dim: usize, variety_dim: usize) -> Result<Self> {
        let mut base = vec![0.0; ambient_dim + 1];
        base[0] = 1.0;
        Self::new(&base, variety_dim)
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    pub fn variety_dim(&self) -> usize {
        self.variety_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.len()
    }

    /// `exp_x(u)` for `u` given in the first `u.len()` frame coordinates.
    pub fn exp(&self, u: &[f64], out: &mut [f64]) {
        debug_assert!(u.len() <= self.frame.len());
        let r = dot(u, u).sqrt();
        let (s, c) = r.sin_cos();
        out.copy_from_slice(&self.base);
        if r == 0.0 {
            return;
        }
        out.iter_mut().for_each(|o| *o *= c);
        for (ui, f) in u.iter().zip(&self.frame) {
            let w = s * ui / r;
            out.iter_mut().zip(f).for_each(|(o, fi)| *o += w * fi);
        }
    }

    /// Tangent coordinates of a point `y` on the sphere (inverse of [`exp`](Self::exp)
    /// on the first `k` frame directions); the geodesic distance is the norm.
    pub fn log(&self, y: &[f64], k: usize) -> Vec<f64> {
        let c = dot(y, &self.base).clamp(-1.0, 1.0);
        let theta = c.acos();
        let proj: Vec<f64> = self.frame[..k].iter().map(|f| dot(y, f)).collect();
        let s = dot(&proj, &proj).sqrt();
        if s == 0.0 {
            return proj;
        }
        proj.into_iter().map(|p| p * theta / s).collect()
    }
}

/// Dimensions of the limit kernel: frequencies in the unit ball of `R^N`,
/// arguments in `R^n` embedded as the first `n` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitKernelSpec {
    pub freq_dim: usize,
    pub eval_dim: usize,
}

impl LimitKernelSpec {
    pub fn new(freq_dim: usize, eval_dim: usize) -> Result<Self> {
        if freq_dim == 0 || eval_dim == 0 || eval_dim > freq_dim {
            return Err(invalid("limit kernel needs 1 ≤ n ≤ N"));
        }
        Ok(Self { freq_dim, eval_dim })
    }
}

/// `K` as a function of `d = |u - v|`:
/// `(2π)^{N/2} d^{-N/2} J_{N/2}(d)`, which equals `vol(B_N)` at `d = 0`.
pub fn limit_kernel_radial(freq_dim: usize, d: f64) -> f64 {
    let d = d.abs();
    let half = freq_dim as f64 / 2.0;
    if d < SERIES_RADIUS {
        let q = (d / 2.0) * (d / 2.0);
        let mut term_pow = 1.0;
        let mut fact = 1.0;
        let mut sum = 0.0;
        for k in 0..6 {
            if k > 0 {
                term_pow *= -q;
                fact *= k as f64;
            }
            sum += term_pow / (fact * gamma(k as f64 + half + 1.0));
        }
        return PI.powf(half) * sum;
    }
    (2.0 * PI).powf(half) * d.powf(-half) * bessel_j(freq_dim as u32, d)
}

pub fn limit_kernel(spec: &LimitKernelSpec, u: &[f64], v: &[f64]) -> f64 {
    let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    limit_kernel_radial(spec.freq_dim, d2.sqrt())
}

/// Independent evaluation of `∫_{B_N} cos⟨u - v, ξ⟩ dξ` by nested adaptive
/// Gauss-Kronrod quadrature, with `ξ_k = ρ sin θ_k` on every level.
pub fn limit_kernel_quadrature(spec: &LimitKernelSpec, u: &[f64], v: &[f64], tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid("quadrature tolerance must be positive"));
    }
    let mut w = vec![0.0; spec.freq_dim];
    for (k, (a, b)) in u.iter().zip(v).enumerate().take(spec.eval_dim) {
        w[k] = a - b;
    }
    const BUDGET: usize = 200_000;
    fn level(w: &[f64], k: usize, rho: f64, phase: f64, tol: f64) -> Result<f64> {
        let last = k + 1 == w.len();
        integrate(
            |theta: f64| {
                let (s, c) = theta.sin_cos();
                let xi = rho * s;
                let jac = rho * c;
                if last {
                    Ok(jac * (phase + w[k] * xi).cos())
                } else {
                    Ok(jac * level(w, k + 1, rho * c, phase + w[k] * xi, tol / 4.0)?)
                }
            },
            -PI / 2.0,
            PI / 2.0,
            tol,
            BUDGET,
        )
    }
    level(&w, 0, 1.0, 0.0, tol / 4.0)
}

/// Anything that provides the covariance `E[P(x)P(y)]` of a degree-m ensemble.
pub trait CovarianceKernel {
    fn spec(&self) -> &EnsembleSpec;

    fn covariance(&self, x: &[f64], y: &[f64]) -> f64;

    /// Feature vector `φ(x)` with `covariance(x, y) = ⟨φ(x), φ(y)⟩`, when cheap.
    fn features(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl CovarianceKernel for Ensemble {
    fn spec(&self) -> &EnsembleSpec {
        Ensemble::spec(self)
    }

    fn covariance(&self, x: &[f64], y: &[f64]) -> f64 {
        self.covariance_exact(x, y)
    }

    fn features(&self, x: &[f64]) -> Option<Vec<f64>> {
        let scale = crate::ensemble::COEFFICIENT_VARIANCE.sqrt();
        Some(self.basis_values(x).into_iter().map(|v| v * scale).collect())
    }
}

/// Basis-free covariance through the addition theorem.
#[derive(Debug, Clone, Copy)]
pub struct ZonalKernel(pub EnsembleSpec);

impl CovarianceKernel for ZonalKernel {
    fn spec(&self) -> &EnsembleSpec {
        &self.0
    }

    fn covariance(&self, x: &[f64], y: &[f64]) -> f64 {
        zonal_covariance(&self.0, x, y)
    }
}

fn check_chart_radius(u: &[f64], degree: usize) -> Result<()> {
    let r = dot(u, u).sqrt() / degree as f64;
    if !(r < PI) {
        return Err(Error::OutsideChart { radius: r, limit: PI });
    }
    Ok(())
}

/// `m^{-s} K_m(exp_x(u/m), exp_x(v/m))`.
pub fn rescaled_kernel(
    cov: &impl CovarianceKernel,
    chart: &ChartAtPoint,
    scale_exponent: f64,
    u: &[f64],
    v: &[f64],
) -> Result<f64> {
    let spec = cov.spec();
    if chart.ambient_dim() != spec.ambient_dim || u.len() != v.len() || u.len() > chart.variety_dim() {
        return Err(invalid("chart and arguments do not match the ensemble dimensions"));
    }
    check_chart_radius(u, spec.degree)?;
    check_chart_radius(v, spec.degree)?;
    let m = spec.degree as f64;
    let mut x = vec![0.0; spec.variables()];
    let mut y = vec![0.0; spec.variables()];
    let us: Vec<f64> = u.iter().map(|a| a / m).collect();
    let vs: Vec<f64> = v.iter().map(|a| a / m).collect();
    chart.exp(&us, &mut x);
    chart.exp(&vs, &mut y);
    Ok(m.powf(-scale_exponent) * cov.covariance(&x, &y))
}

/// Scale exponent and constant with `m^{-s} K_m(x, x) → c · K(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Calibration {
    /// Least-squares slope of `log K_m(x, x)` against `log m`, before snapping.
    pub fitted_exponent: f64,
    /// The fitted slope rounded to the nearest integer.
    pub scale_exponent: f64,
    /// Richardson extrapolation (in `1/m`) of the diagonal ratio.
    pub constant: f64,
}

/// Fits the diagonal growth of the covariance over `degrees`. A single degree
/// is complemented by its double.
pub fn calibrate(
    make: impl Fn(usize) -> Result<Box<dyn CovarianceKernel>>,
    chart: &ChartAtPoint,
    limit: &LimitKernelSpec,
    degrees: &[usize],
) -> Result<Calibration> {
    let mut ms: Vec<usize> = degrees.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.is_empty() {
        return Err(invalid("calibration needs at least one degree"));
    }
    if ms.len() == 1 {
        ms.push(2 * ms[0]);
    }
    let diag: Vec<f64> = ms
        .iter()
        .map(|&m| {
            let cov = make(m)?;
            Ok(cov.covariance(chart.base(), chart.base()))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = diag.iter().map(|d| d.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let fitted = sxy / sxx;
    let s = fitted.round();
    let k0 = limit_kernel_radial(limit.freq_dim, 0.0);
    let ratio = |i: usize| (ms[i] as f64).powf(-s) * diag[i] / k0;
    let (i1, i2) = (ms.len() - 2, ms.len() - 1);
    let (m1, m2) = (ms[i1] as f64, ms[i2] as f64);
    let constant = (m2 * ratio(i2) - m1 * ratio(i1)) / (m2 - m1);
    Ok(Calibration { fitted_exponent: fitted, scale_exponent: s, constant })
}

/// Regular grid with `per_axis` points on `[-radius, radius]^n`, clipped to the
/// closed ball of that radius.
pub fn ball_grid(dim: usize, radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let total = per_axis.pow(dim as u32);
    let step = if per_axis > 1 { 2.0 * radius / (per_axis - 1) as f64 } else { 0.0 };
    for idx in 0..total {
        let mut rem = idx;
        let p: Vec<f64> = (0..dim)
            .map(|_| {
                let i = rem % per_axis;
                rem /= per_axis;
                if per_axis > 1 {
                    -radius + i as f64 * step
                } else {
                    0.0
                }
            })
            .collect();
        if dot(&p, &p) <= radius * radius * (1.0 + 1e-12) {
            out.push(p);
        }
    }
    out
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceRow {
    pub degree: usize,
    /// `sup |K_{m,x}(u, v) - c K(u, v)|` over all grid pairs.
    pub sup_error: f64,
    /// Same for the first central difference in the first coordinate of `u`.
    pub sup_derivative_error: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceReport {
    pub limit: LimitKernelSpec,
    pub calibration: Calibration,
    pub grid: Vec<Vec<f64>>,
    pub rows: Vec<ConvergenceRow>,
}

/// Step of the central difference used for derivative errors.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// Compares the rescaled covariance with the calibrated limit kernel on all
/// pairs of `grid`, for every degree in `degrees`.
pub fn convergence_report(
    make: impl Fn(usize) -> Result<Box<dyn CovarianceKernel>>,
    chart: &ChartAtPoint,
    limit: &LimitKernelSpec,
    degrees: &[usize],
    grid: &[Vec<f64>],
) -> Result<ConvergenceReport> {
    let calibration = calibrate(&make, chart, limit, degrees)?;
    let s = calibration.scale_exponent;
    let c = calibration.constant;
    let h = DERIVATIVE_STEP;
    let mut rows = Vec::with_capacity(degrees.len());
    for &m in degrees {
        let cov = make(m)?;
        let mf = m as f64;
        let scale = mf.powf(-s);
        let mut points: Vec<Vec<f64>> = Vec::with_capacity(grid.len() * 3);
        for u in grid {
            check_chart_radius(u, m)?;
            points.push(u.clone());
            for sign in [1.0, -1.0] {
                let mut p = u.clone();
                p[0] += sign * h;
                points.push(p);
            }
        }
        let sphere_pts: Vec<Vec<f64>> = points
            .iter()
            .map(|u| {
                let us: Vec<f64> = u.iter().map(|a| a / mf).collect();
                let mut x = vec![0.0; cov.spec().variables()];
                chart.exp(&us, &mut x);
                x
            })
            .collect();
        let feats: Option<Vec<Vec<f64>>> = sphere_pts.iter().map(|x| cov.features(x)).collect();
        let kval = |i: usize, j: usize| -> f64 {
            scale
                * match &feats {
                    Some(f) => dot(&f[i], &f[j]),
                    None => cov.covariance(&sphere_pts[i], &sphere_pts[j]),
                }
        };
        let mut sup = 0.0_f64;
        let mut sup_d = 0.0_f64;
        for (a, u) in grid.iter().enumerate() {
            for (b, v) in grid.iter().enumerate() {
                let (ia, ib) = (3 * a, 3 * b);
                let err = (kval(ia, ib) - c * limit_kernel(limit, u, v)).abs();
                sup = sup.max(err);
                let dk = (kval(ia + 1, ib) - kval(ia + 2, ib)) / (2.0 * h);
                let (up, um) = (&points[ia + 1], &points[ia + 2]);
                let dl = (limit_kernel(limit, up, v) - limit_kernel(limit, um, v)) / (2.0 * h);
                sup_d = sup_d.max((dk - c * dl).abs());
            }
        }
        rows.push(ConvergenceRow { degree: m, sup_error: sup, sup_derivative_error: sup_d, constant: c });
    }
    Ok(ConvergenceReport { limit: *limit, calibration, grid: grid.to_vec(), rows })
}

/// The limit constant `1 / (2 (2π)^N)` implied by the addition theorem for
/// unit coefficient variance and `s = N`.
pub fn expected_constant(ambient_dim: usize) -> f64 {
    crate::ensemble::COEFFICIENT_VARIANCE / (2.0 * (2.0 * PI).powi(ambient_dim as i32))
}

/// Volume of the frequency ball, `K(0, 0)`.
pub fn limit_kernel_at_zero(freq_dim: usize) -> f64 {
    unit_ball_volume(freq_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::BasisKind;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_special_cases() {
        let k2 = LimitKernelSpec::new(2, 2).unwrap();
        assert_relative_eq!(limit_kernel(&k2, &[0.3, 0.1], &[0.3, 0.1]), PI, epsilon = 1e-14);
        let k1 = LimitKernelSpec::new(1, 1).unwrap();
        for d in [1e-6, 1e-3, 0.5, 2.0, 17.0] {
            assert_relative_eq!(limit_kernel(&k1, &[d], &[0.0]), 2.0 * d.sin() / d, epsilon = 1e-13);
        }
    }

    #[test]
    fn series_and_bessel_agree_at_switch() {
        for n in 1..=4 {
            let below = limit_kernel_radial(n, SERIES_RADIUS * (1.0 - 1e-9));
            let above = limit_kernel_radial(n, SERIES_RADIUS * (1.0 + 1e-9));
            assert_relative_eq!(below, above, max_relative = 1e-10);
        }
    }

    #[test]
    fn quadrature_matches_ball_volume() {
        let k3 = LimitKernelSpec::new(3, 3).unwrap();
        let q = limit_kernel_quadrature(&k3, &[0.0; 3], &[0.0; 3], 1e-10).unwrap();
        assert_relative_eq!(q, 4.0 * PI / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn chart_exp_stays_on_sphere_and_log_inverts() {
        let b = [0.6, 0.0, 0.8];
        let chart = ChartAtPoint::new(&b, 2).unwrap();
        for f in chart.frame() {
            assert!(dot(f, &b).abs() < 1e-14);
        }
        let mut y = [0.0; 3];
        chart.exp(&[0.3, -0.2], &mut y);
        assert!((dot(&y, &y) - 1.0).abs() < 1e-12);
        let back = chart.log(&y, 2);
        assert_relative_eq!(back[0], 0.3, epsilon = 1e-12);
        assert_relative_eq!(back[1], -0.2, epsilon = 1e-12);
    }

    #[test]
    fn rescaled_kernel_rejects_far_points() {
        let spec = EnsembleSpec::hypersurface(1, 2).unwrap();
        let chart = ChartAtPoint::north_pole(1, 1).unwrap();
        let e = rescaled_kernel(&ZonalKernel(spec), &chart, 1.0, &[7.0], &[0.0]);
        assert!(matches!(e, Err(Error::OutsideChart { .. })));
    }

    #[test]
    fn calibration_recovers_analytic_constant() {
        let chart = ChartAtPoint::north_pole(2, 2).unwrap();
        let limit = LimitKernelSpec::new(2, 2).unwrap();
        let cal = calibrate(
            |m| Ok(Box::new(Ensemble::new(EnsembleSpec::hypersurface(2, m)?, BasisKind::Harmonic)?) as Box<dyn CovarianceKernel>),
            &chart,
            &limit,
            &[10, 20, 40, 80],
        )
        .unwrap();
        assert_eq!(cal.scale_exponent, 2.0);
        assert_relative_eq!(cal.constant, expected_constant(2), max_relative = 1e-3);
    }
}
