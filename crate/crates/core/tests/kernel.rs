//! Structural properties of the limit kernel.

use nodal_core::kernel::{limit_kernel, limit_kernel_at_zero, limit_kernel_quadrature, limit_kernel_radial, LimitKernelSpec};
use nodal_core::linalg::{Cholesky, Matrix};
use nodal_core::math::unit_ball_volume;
use proptest::prelude::*;

#[test]
fn value_at_zero_is_ball_volume() {
    for n in 1..=5 {
        assert!((limit_kernel_at_zero(n) - unit_ball_volume(n)).abs() < 1e-15);
        assert!((limit_kernel_radial(n, 0.0) - unit_ball_volume(n)).abs() < 1e-14);
    }
}

#[test]
fn kernel_matrix_is_positive_definite_on_separated_points() {
    // Points at spacing 4 keep the matrix well conditioned for every N.
    for n in 1..=3 {
        let spec = LimitKernelSpec::new(n, n).unwrap();
        let pts: Vec<Vec<f64>> = (0..12).map(|i| (0..n).map(|k| 4.0 * i as f64 + 0.3 * k as f64).collect()).collect();
        let a = Matrix::from_fn(pts.len(), pts.len(), |i, j| limit_kernel(&spec, &pts[i], &pts[j]));
        assert!(Cholesky::new(&a, 0.0).is_ok(), "N = {n}");
    }
}

proptest! {
    #[test]
    fn quadratic_forms_are_nonnegative(
        n in 1usize..=3,
        coords in prop::collection::vec(-6.0f64..6.0, 60),
        weights in prop::collection::vec(-1.0f64..1.0, 20),
    ) {
        let spec = LimitKernelSpec::new(n, n).unwrap();
        let pts: Vec<&[f64]> = coords.chunks(3).map(|c| &c[..n]).collect();
        let mut q = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for (j, r) in pts.iter().enumerate() {
                q += weights[i] * weights[j] * limit_kernel(&spec, p, r);
            }
        }
        let scale: f64 = weights.iter().map(|w| w * w).sum::<f64>() * unit_ball_volume(n);
        prop_assert!(q >= -1e-12 * scale, "{q}");
    }
}

#[test]
fn embedded_argument_matches_quadrature() {
    let spec = LimitKernelSpec::new(3, 2).unwrap();
    let (u, v) = ([0.3, -1.2], [1.0, 0.4]);
    let q = limit_kernel_quadrature(&spec, &u, &v, 1e-11).unwrap();
    assert!((limit_kernel(&spec, &u, &v) - q).abs() < 1e-8);
}

proptest! {
    #[test]
    fn stationary_and_symmetric(
        n in 1usize..=3,
        u in prop::collection::vec(-10.0f64..10.0, 3),
        v in prop::collection::vec(-10.0f64..10.0, 3),
        s in prop::collection::vec(-10.0f64..10.0, 3),
    ) {
        let spec = LimitKernelSpec::new(n, n).unwrap();
        let (u, v, s) = (&u[..n], &v[..n], &s[..n]);
        let us: Vec<f64> = u.iter().zip(s).map(|(a, b)| a + b).collect();
        let vs: Vec<f64> = v.iter().zip(s).map(|(a, b)| a + b).collect();
        let k = limit_kernel(&spec, u, v);
        prop_assert!((k - limit_kernel(&spec, v, u)).abs() == 0.0);
        prop_assert!((k - limit_kernel(&spec, &us, &vs)).abs() < 1e-12);
        prop_assert!(k.abs() <= unit_ball_volume(n) * (1.0 + 1e-12));
    }
}

#[test]
fn rescaled_covariance_converges_to_calibrated_limit() {
    use nodal_core::ensemble::{BasisKind, Ensemble, EnsembleSpec};
    use nodal_core::kernel::{ball_grid, convergence_report, expected_constant, ChartAtPoint, CovarianceKernel};
    for (big_n, n) in [(1, 1), (2, 2), (2, 1)] {
        let chart = ChartAtPoint::north_pole(big_n, n).unwrap();
        let limit = LimitKernelSpec::new(big_n, n).unwrap();
        let grid = ball_grid(n, 3.0, 9);
        let report = convergence_report(
            |m| Ok(Box::new(Ensemble::new(EnsembleSpec::new(big_n, m, 1, n)?, BasisKind::Auto)?) as Box<dyn CovarianceKernel>),
            &chart,
            &limit,
            &[10, 20, 40, 80],
            &grid,
        )
        .unwrap();
        assert_eq!(report.calibration.scale_exponent, big_n as f64);
        assert!((report.calibration.constant / expected_constant(big_n) - 1.0).abs() < 1e-3);
        let errs: Vec<f64> = report.rows.iter().map(|r| r.sup_error).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "({big_n}, {n}): {errs:?}");
        let derivs: Vec<f64> = report.rows.iter().map(|r| r.sup_derivative_error).collect();
        assert!(derivs.windows(2).all(|w| w[1] < w[0]), "({big_n}, {n}): {derivs:?}");
    }
}
