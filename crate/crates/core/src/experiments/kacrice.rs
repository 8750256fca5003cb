//! Expected number of zeros on `S^1`: the Kac–Rice value from spectral moments
//! of the exact covariance, and a Monte Carlo count to audit against it.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_degeneracy, mean_and_error, tags, Executor, TrialOutcome};
use crate::ensemble::Ensemble;
use crate::error::{invalid, Error, Result};
use crate::rng::StreamSeed;
use crate::topology::extract_on_circle;

fn on_circle(theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c, s]
}

/// `(L/π) sqrt(λ₂/λ₀)` with `L = 2π`, where `λ₀ = K(θ, θ)` and `λ₂` is the
/// mixed second derivative `∂_θ ∂_θ' K` on the diagonal, by central differences.
pub fn kac_rice_zero_count(ensemble: &Ensemble) -> Result<f64> {
    let spec = ensemble.spec();
    if spec.ambient_dim != 1 || spec.variety_dim != 1 || spec.codim != 1 {
        return Err(invalid("the Kac–Rice audit needs N = n = r = 1"));
    }
    let theta = 0.3;
    let h = 1e-4 / spec.degree as f64;
    let k = |a: f64, b: f64| ensemble.covariance_exact(&on_circle(a), &on_circle(b));
    let lambda0 = k(theta, theta);
    let lambda2 = (k(theta + h, theta + h) - k(theta + h, theta - h) - k(theta - h, theta + h) + k(theta - h, theta - h)) / (4.0 * h * h);
    let length = 2.0 * PI;
    Ok(length / PI * (lambda2 / lambda0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroCountEstimate {
    pub degree: usize,
    pub mean: f64,
    pub std_error: f64,
    pub counts: Vec<TrialOutcome<usize>>,
}

/// Mean number of sign changes of random draws on `points` equally spaced angles.
pub fn monte_carlo_zero_count(
    ensemble: &Ensemble,
    points: usize,
    trials: usize,
    seed: u64,
    exec: &impl Executor,
) -> Result<ZeroCountEstimate> {
    let spec = ensemble.spec();
    if spec.ambient_dim != 1 || trials < 2 {
        return Err(invalid("zero counting on S^1 needs N = 1 and two or more trials"));
    }
    let stream = StreamSeed::new(seed).child(tags::KAC_RICE).child(spec.degree as u64);
    let results = exec.map_trials(trials, |i| {
        let p = ensemble.sample(&mut stream.trial(i as u64));
        match extract_on_circle(&p, points) {
            Ok(rep) => Ok(TrialOutcome::Ok(rep.components.len())),
            Err(Error::Degenerate(_)) => Ok(TrialOutcome::Degenerate),
            Err(e) => Err(e),
        }
    });
    let counts = results.into_iter().collect::<Result<Vec<_>>>()?;
    check_degeneracy(&counts)?;
    let values: Vec<f64> = counts.iter().filter_map(|c| c.ok().map(|&v| v as f64)).collect();
    let (mean, std_error) = mean_and_error(&values);
    Ok(ZeroCountEstimate { degree: spec.degree, mean, std_error, counts })
}
