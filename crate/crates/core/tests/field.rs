//! Statistical checks of the field samplers against the limit kernel.

use nodal_core::experiments::mean_and_error;
use nodal_core::field::{sample_field_exact, sample_field_exact_grid, sample_field_spectral, sample_field_tuple, GridSpec};
use nodal_core::func::ScalarField;
use nodal_core::kernel::{limit_kernel, LimitKernelSpec};
use nodal_core::rng::StreamSeed;

const SAMPLES: usize = 10_000;

fn probes() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [1.0, 0.0], [0.0, 2.5], [-1.5, 1.5], [3.0, -4.0], [0.3, 0.2]]
}

/// Values of `SAMPLES` spectral realizations at the probe points.
fn spectral_values(seed: u64) -> Vec<Vec<f64>> {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let stream = StreamSeed::new(seed);
    let pts = probes();
    (0..SAMPLES)
        .map(|i| {
            let f = sample_field_spectral(&spec, 512, &mut stream.trial(i as u64)).unwrap();
            pts.iter().map(|p| f.eval(p)).collect()
        })
        .collect()
}

fn column(values: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    values.iter().map(|v| f(v)).collect()
}

#[test]
fn spectral_covariance_matches_kernel() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let values = spectral_values(11);
    let pts = probes();
    for (a, b) in [(0, 0), (0, 1), (0, 2), (3, 4), (1, 5)] {
        let (mean, se) = mean_and_error(&column(&values, |v| v[a] * v[b]));
        let target = limit_kernel(&spec, &pts[a], &pts[b]);
        assert!((mean - target).abs() < 4.0 * se, "pair ({a}, {b}): {mean} vs {target} ± {se}");
    }
}

#[test]
fn spectral_field_is_centered() {
    let values = spectral_values(12);
    for k in 0..probes().len() {
        let (mean, se) = mean_and_error(&column(&values, |v| v[k]));
        assert!(mean.abs() < 4.0 * se, "probe {k}: {mean} ± {se}");
    }
}

#[test]
fn spectral_marginals_look_gaussian() {
    let values = spectral_values(13);
    let n = SAMPLES as f64;
    let skew_se = (6.0 / n).sqrt();
    let kurt_se = (24.0 / n).sqrt();
    for k in 0..probes().len() {
        let x = column(&values, |v| v[k]);
        let mean = x.iter().sum::<f64>() / n;
        let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2) - 3.0;
        assert!(skew.abs() < 5.0 * skew_se, "probe {k}: skewness {skew}");
        assert!(kurt.abs() < 5.0 * kurt_se, "probe {k}: excess kurtosis {kurt}");
    }
}

#[test]
fn spectral_sampler_is_deterministic() {
    let spec = LimitKernelSpec::new(3, 2).unwrap();
    let a = sample_field_spectral(&spec, 64, &mut StreamSeed::new(5).trial(3)).unwrap();
    let b = sample_field_spectral(&spec, 64, &mut StreamSeed::new(5).trial(3)).unwrap();
    assert_eq!(a, b);
    assert!((0..64).all(|j| a.frequency(j).iter().map(|x| x * x).sum::<f64>() <= 1.0));
}

#[test]
fn tuple_of_one_is_the_single_sampler() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let stream = StreamSeed::new(21).child(4);
    let single = sample_field_spectral(&spec, 128, &mut stream.trial(0)).unwrap();
    let tuple = sample_field_tuple(&spec, 128, 1, &mut stream.trial(0)).unwrap();
    assert_eq!(tuple, vec![single]);
}

#[test]
fn tuple_entries_are_uncorrelated() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let stream = StreamSeed::new(22);
    let pts = [[0.0, 0.0], [1.0, -1.0], [2.0, 0.5]];
    let products: Vec<Vec<f64>> = (0..SAMPLES)
        .map(|i| {
            let fs = sample_field_tuple(&spec, 512, 2, &mut stream.trial(i as u64)).unwrap();
            pts.iter().map(|p| fs[0].eval(p) * fs[1].eval(p)).collect()
        })
        .collect();
    for k in 0..pts.len() {
        let (mean, se) = mean_and_error(&column(&products, |v| v[k]));
        assert!(mean.abs() < 4.0 * se, "probe {k}: {mean} ± {se}");
    }
}

#[test]
fn exact_sampler_handles_coincident_points() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let pts = vec![vec![0.4, -0.2], vec![0.4, -0.2]];
    for i in 0..20 {
        let s = sample_field_exact(&spec, &pts, &mut StreamSeed::new(31).trial(i)).unwrap();
        assert!(s.jitter > 0.0);
        assert!((s.values[0] - s.values[1]).abs() < 1e-4, "{:?}", s.values);
    }
}

#[test]
fn exact_sampler_covariance_matches_kernel() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let pts = vec![vec![0.0, 0.0], vec![0.8, 0.0], vec![0.0, 2.0]];
    let stream = StreamSeed::new(32);
    let values: Vec<Vec<f64>> = (0..SAMPLES).map(|i| sample_field_exact(&spec, &pts, &mut stream.trial(i as u64)).unwrap().values).collect();
    for a in 0..3 {
        for b in a..3 {
            let (mean, se) = mean_and_error(&column(&values, |v| v[a] * v[b]));
            let target = limit_kernel(&spec, &pts[a], &pts[b]);
            assert!((mean - target).abs() < 4.0 * se, "entry ({a}, {b}): {mean} vs {target} ± {se}");
        }
    }
}

#[test]
fn exact_sampler_is_exchangeable() {
    // Relabeling the points relabels the law: the covariance of the sample at
    // the permuted points matches the permuted covariance.
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let pts = vec![vec![0.0, 0.0], vec![1.1, 0.3], vec![-0.5, 1.7]];
    let perm = [2, 0, 1];
    let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| pts[i].clone()).collect();
    let stream = StreamSeed::new(33);
    let samples: Vec<Vec<f64>> =
        (0..SAMPLES).map(|i| sample_field_exact(&spec, &permuted, &mut stream.trial(i as u64)).unwrap().values).collect();
    for a in 0..3 {
        for b in 0..3 {
            let (mean, se) = mean_and_error(&column(&samples, |v| v[a] * v[b]));
            let target = limit_kernel(&spec, &pts[perm[a]], &pts[perm[b]]);
            assert!((mean - target).abs() < 4.0 * se, "entry ({a}, {b}): {mean} vs {target} ± {se}");
        }
    }
}

#[test]
fn exact_grid_sampler_respects_budget_and_dimension() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let small = GridSpec::centered(2, 1.0, 5).unwrap();
    let s = sample_field_exact_grid(&small, &spec, &mut StreamSeed::new(1).trial(0)).unwrap();
    assert_eq!(s.values.len(), 25);
    let large = GridSpec::centered(2, 1.0, 101).unwrap();
    assert!(sample_field_exact_grid(&large, &spec, &mut StreamSeed::new(1).trial(0)).is_err());
    let wrong = GridSpec::centered(1, 1.0, 5).unwrap();
    assert!(sample_field_exact_grid(&wrong, &spec, &mut StreamSeed::new(1).trial(0)).is_err());
}

#[test]
fn samplers_agree_in_distribution() {
    // Spectral and exact samples share the second moment at a pair of points.
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let pts = vec![vec![0.0, 0.0], vec![1.5, 0.5]];
    let stream = StreamSeed::new(34);
    let exact: Vec<f64> = (0..SAMPLES)
        .map(|i| {
            let v = sample_field_exact(&spec, &pts, &mut stream.child(0).trial(i as u64)).unwrap().values;
            v[0] * v[1]
        })
        .collect();
    let spectral: Vec<f64> = (0..SAMPLES)
        .map(|i| {
            let f = sample_field_spectral(&spec, 512, &mut stream.child(1).trial(i as u64)).unwrap();
            f.eval(&pts[0]) * f.eval(&pts[1])
        })
        .collect();
    let (ma, sa) = mean_and_error(&exact);
    let (mb, sb) = mean_and_error(&spectral);
    assert!((ma - mb).abs() < 4.0 * (sa * sa + sb * sb).sqrt(), "{ma} ± {sa} vs {mb} ± {sb}");
}

#[test]
fn joint_zero_set_of_two_fields_is_finite() {
    use nodal_core::topology::{extract_components_codim_r, CodimOptions, Signature};
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let grid = GridSpec::centered(2, 6.0, 61).unwrap();
    for i in 0..5 {
        let fs = sample_field_tuple(&spec, 512, 2, &mut StreamSeed::new(35).trial(i)).unwrap();
        let refs: Vec<&dyn ScalarField> = fs.iter().map(|f| f as &dyn ScalarField).collect();
        let rep = extract_components_codim_r(&refs, &grid, &CodimOptions::default()).unwrap();
        assert!(rep.closed_count() > 0);
        for c in rep.closed_components() {
            assert_eq!(c.signature, Signature::point());
            // Every refined copy of the point is a common root near the first.
            let first = &c.points[..2];
            for x in c.points.chunks(2) {
                assert!(fs.iter().all(|f| f.eval(x).abs() < 1e-8), "trial {i}: {x:?}");
                assert!((x[0] - first[0]).hypot(x[1] - first[1]) < 1e-6, "trial {i}: {x:?} vs {first:?}");
            }
        }
    }
}
