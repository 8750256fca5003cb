//! Monte Carlo experiments: ball packings of spheres, barrier probabilities,
//! expected-count scaling, the packing lower bound and a Kac–Rice audit.
//!
//! Every trial draws from its own stream `seed.child(tag).trial(i)` and results
//! are reduced in trial order, so aggregates do not depend on the executor.

mod barrier;
mod kacrice;
mod packing;
mod scaling;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub use barrier::{barrier_probability, MIN_TRIALS, BarrierConfig, BarrierEstimate, BarrierModel, BarrierRun, ChartField};
pub use kacrice::{kac_rice_zero_count, monte_carlo_zero_count, ZeroCountEstimate};
pub use packing::{pack_balls, PackingResult, PACKING_CONSTANT};
pub use scaling::{
    expected_count_scaling, lower_bound_assembly, AssemblyConfig, AssemblyResult, ScalingConfig, ScalingResult, ScalingRow,
    SphereCounter,
};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Largest tolerated fraction of degenerate trials.
pub const DEGENERACY_BUDGET: f64 = 0.01;

/// Stream tags separating the experiments that share a master seed.
pub mod tags {
    pub const BARRIER: u64 = 1;
    pub const SCALING: u64 = 2;
    pub const ASSEMBLY: u64 = 3;
    pub const KAC_RICE: u64 = 4;
    pub const PACKING_AUDIT: u64 = 5;
    pub const FIELD_SAMPLE: u64 = 6;
    pub const KERNEL_ORACLE: u64 = 7;
}

/// Runs independent trials. Implementations may run them in any order or in
/// parallel but must return results indexed by trial.
pub trait Executor {
    fn map_trials<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs trials one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_trials<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}

impl<E: Executor + ?Sized> Executor for &E {
    fn map_trials<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (**self).map_trials(count, f)
    }
}

/// Result of one trial.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TrialOutcome<T> {
    Ok(T),
    /// The extractor could not resolve the realization after all grid offsets.
    Degenerate,
}

impl<T> TrialOutcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            TrialOutcome::Ok(t) => Some(t),
            TrialOutcome::Degenerate => None,
        }
    }
}

/// Fails when more than [`DEGENERACY_BUDGET`] of the trials were degenerate.
pub fn check_degeneracy<T>(outcomes: &[TrialOutcome<T>]) -> crate::Result<()> {
    let degenerate = outcomes.iter().filter(|o| o.ok().is_none()).count();
    if degenerate as f64 > DEGENERACY_BUDGET * outcomes.len() as f64 {
        return Err(crate::Error::DegeneracyBudget { degenerate, trials: outcomes.len() });
    }
    Ok(())
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Sample mean and standard error of the mean, summed in order.
pub fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Weighted least squares line `y = a + b x`; returns `(a, b, se_b)`.
pub fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope, (1.0 / sxx).sqrt())
}

#[cfg(test)]
mod tests;
