use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::ensemble::{BasisKind, Ensemble, EnsembleSpec};
use crate::kernel::{ChartAtPoint, LimitKernelSpec};
use crate::rng::StreamSeed;
use crate::topology::{CountMode, QuotientMode, Sigma};

#[test]
fn wilson_examples() {
    let (lo, hi) = wilson_interval(0, 100);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.03 && hi < 0.04);
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    assert_eq!(wilson_interval(100, 100).1, 1.0);
}

proptest! {
    #[test]
    fn wilson_contains_the_estimate(n in 1usize..5000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as usize;
        let (lo, hi) = wilson_interval(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }
}

#[test]
fn weighted_line_recovers_exact_slope() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y: Vec<f64> = x.iter().map(|v| 0.5 + 2.0 * v).collect();
    let (a, b, _) = weighted_line(&x, &y, &[1.0, 2.0, 3.0, 4.0]);
    assert!((a - 0.5).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
}

#[test]
fn degeneracy_budget() {
    let mut v: Vec<TrialOutcome<usize>> = vec![TrialOutcome::Ok(1); 199];
    v.push(TrialOutcome::Degenerate);
    v.push(TrialOutcome::Degenerate);
    assert!(check_degeneracy(&v).is_ok());
    v.push(TrialOutcome::Degenerate);
    assert!(matches!(check_degeneracy(&v), Err(crate::Error::DegeneracyBudget { degenerate: 3, trials: 202 })));
}

#[test]
fn circle_packing_is_maximal() {
    let p = pack_balls(1, 0.1).unwrap();
    assert_eq!(p.count(), 31);
    assert!(p.min_separation() >= 0.2 - 1e-12);
    let mut rng = StreamSeed::new(1).trial(0);
    assert!(p.coverage_probe(10_000, &mut rng) <= 0.2);
}

#[test]
fn sphere_packing_invariants() {
    for radius in [0.5, 0.2, 0.1] {
        let p = pack_balls(2, radius).unwrap();
        assert!(p.min_separation() >= 2.0 * radius, "radius {radius}");
        let mut rng = StreamSeed::new(2).trial(0);
        assert!(p.coverage_probe(10_000, &mut rng) <= 2.0 * radius, "radius {radius}");
        assert!(p.count() as f64 >= PACKING_CONSTANT / (radius * radius));
    }
}

#[test]
fn halving_the_radius_roughly_quadruples_the_count() {
    let a = pack_balls(2, 0.2).unwrap().count() as f64;
    let b = pack_balls(2, 0.1).unwrap().count() as f64;
    assert!((3.5..=4.5).contains(&(b / a)), "ratio {}", b / a);
}

#[test]
fn packing_rejects_large_radius() {
    assert!(pack_balls(2, 0.8).is_err());
    assert!(pack_balls(2, 0.0).is_err());
}

#[test]
fn kac_rice_linear_is_two() {
    let e = Ensemble::new(EnsembleSpec::hypersurface(1, 1).unwrap(), BasisKind::Auto).unwrap();
    assert!((kac_rice_zero_count(&e).unwrap() - 2.0).abs() < 1e-6);
    let mc = monte_carlo_zero_count(&e, 64, 50, 3, &Sequential).unwrap();
    assert_eq!(mc.mean, 2.0);
    assert_eq!(mc.std_error, 0.0);
}

#[test]
fn kac_rice_matches_harmonic_moments() {
    // Restricted to S^1 the ensemble is white noise on the frequencies
    // l ≡ m (mod 2), l ≤ m, each with a cosine and a sine (one term for l = 0).
    for m in [2usize, 5, 10] {
        let e = Ensemble::new(EnsembleSpec::hypersurface(1, m).unwrap(), BasisKind::Auto).unwrap();
        let (mut s0, mut s2) = (0.0, 0.0);
        for l in (0..=m).filter(|l| (m - l) % 2 == 0) {
            let mult = if l == 0 { 1.0 } else { 2.0 };
            s0 += mult;
            s2 += mult * (l * l) as f64;
        }
        let expected = 2.0 * (s2 / s0).sqrt();
        assert!((kac_rice_zero_count(&e).unwrap() - expected).abs() < 1e-5 * expected, "m = {m}");
    }
}

#[test]
fn barrier_is_monotone_and_reproducible() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let model = BarrierModel::Limit { spec, frequencies: 128, codim: 1 };
    let config = BarrierConfig {
        sigma: Sigma::parse("circle").unwrap(),
        mode: CountMode::Strict,
        radii: vec![2.0, 4.0, 6.0],
        resolution: 97,
        trials: 100,
        seed: 9,
    };
    let run = barrier_probability(&model, &config, &Sequential).unwrap();
    for o in &run.outcomes {
        let h = o.ok().unwrap();
        assert!(h.windows(2).all(|w| !w[0] || w[1]));
    }
    for e in &run.estimates {
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }
    assert!(run.estimates.windows(2).all(|w| w[0].p_hat <= w[1].p_hat));
    assert!(run.estimates[2].ci_low > 0.0);
    assert_eq!(run, barrier_probability(&model, &config, &Sequential).unwrap());
}

#[test]
fn barrier_rejects_small_runs_and_mismatched_sigma() {
    let spec = LimitKernelSpec::new(2, 2).unwrap();
    let model = BarrierModel::Limit { spec, frequencies: 64, codim: 1 };
    let mut config = BarrierConfig {
        sigma: Sigma::parse("sphere").unwrap(),
        mode: CountMode::Strict,
        radii: vec![3.0],
        resolution: 33,
        trials: 100,
        seed: 1,
    };
    assert!(barrier_probability(&model, &config, &Sequential).is_err());
    config.sigma = Sigma::parse("circle").unwrap();
    config.trials = 10;
    assert!(barrier_probability(&model, &config, &Sequential).is_err());
}

#[test]
fn polynomial_barrier_is_zonal() {
    // Same law at two base points: the estimates agree within their intervals.
    let e = Ensemble::new(EnsembleSpec::hypersurface(2, 12).unwrap(), BasisKind::Auto).unwrap();
    let north = ChartAtPoint::north_pole(2, 2).unwrap();
    let s = 0.6f64;
    let other = ChartAtPoint::new(&[s.cos(), s.sin() * 0.6, s.sin() * 0.8], 2).unwrap();
    let config = BarrierConfig {
        sigma: Sigma::parse("circle").unwrap(),
        mode: CountMode::Strict,
        radii: vec![6.0],
        resolution: 49,
        trials: 100,
        seed: 4,
    };
    let a = barrier_probability(&BarrierModel::Polynomial { ensemble: &e, chart: &north }, &config, &Sequential).unwrap();
    let b = barrier_probability(&BarrierModel::Polynomial { ensemble: &e, chart: &other }, &config, &Sequential).unwrap();
    let (ea, eb) = (&a.estimates[0], &b.estimates[0]);
    assert!(ea.ci_low <= eb.ci_high && eb.ci_low <= ea.ci_high, "{ea:?} {eb:?}");
}

#[test]
fn linear_control_has_one_great_circle() {
    let config = ScalingConfig {
        ambient_dim: 2,
        variety_dim: 2,
        degrees: vec![1],
        sigma: Sigma::parse("circle").unwrap(),
        mode: CountMode::Strict,
        quotient: QuotientMode::None,
        resolution: 33,
        trials: 20,
        seed: 5,
    };
    let r = expected_count_scaling(&config, &Sequential).unwrap();
    assert_eq!(r.rows[0].mean, 1.0);
    assert_eq!(r.rows[0].std_error, 0.0);
    assert!(r.slope.is_nan());
    let q = expected_count_scaling(&ScalingConfig { quotient: QuotientMode::Antipodal, ..config }, &Sequential).unwrap();
    assert_eq!(q.rows[0].mean, 1.0);
}

#[test]
fn scaling_on_the_circle_counts_points() {
    let config = ScalingConfig {
        ambient_dim: 1,
        variety_dim: 1,
        degrees: vec![3, 6],
        sigma: Sigma::parse("point").unwrap(),
        mode: CountMode::Strict,
        quotient: QuotientMode::Antipodal,
        resolution: 512,
        trials: 50,
        seed: 6,
    };
    let r = expected_count_scaling(&config, &Sequential).unwrap();
    for row in &r.rows {
        // Half of the zeros survive the quotient; at least m/... and at most m.
        for c in &row.counts {
            let k = *c.ok().unwrap();
            assert!(k <= row.degree && (row.degree - k) % 2 == 0);
        }
    }
}

#[test]
fn small_assembly_holds_per_trial() {
    let config = AssemblyConfig {
        ambient_dim: 2,
        variety_dim: 2,
        degree: 8,
        radius: 3.0,
        sigma: Sigma::parse("circle").unwrap(),
        mode: CountMode::Strict,
        resolution: 65,
        trials: 30,
        seed: 8,
    };
    let r = lower_bound_assembly(&config, &Sequential).unwrap();
    assert!(r.holds_per_trial && r.holds);
    assert_eq!(r.per_ball.len(), r.packing.count());
}
