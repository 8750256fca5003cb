//! Estimates of the probability that a ball of radius `R` (in rescaled units)
//! contains a closed component of prescribed type.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_degeneracy, tags, wilson_interval, Executor, TrialOutcome};
use crate::ensemble::{Ensemble, RandomPolynomial};
use crate::error::{invalid, Error, Result};
use crate::field::{sample_field_tuple, GridSpec};
use crate::func::{ScalarField, SphereFunction};
use crate::kernel::{ChartAtPoint, LimitKernelSpec};
use crate::rng::StreamSeed;
use crate::topology::{count_n_sigma, extract_components_codim_r, extract_components_hypersurface, CodimOptions, ComponentReport, CountMode, Sigma};

/// Smallest accepted number of barrier trials.
pub const MIN_TRIALS: usize = 100;

/// A polynomial read in normal coordinates at scale `1/m`: `u ↦ P(exp_x(u/m))`.
#[derive(Debug, Clone)]
pub struct ChartField<'a> {
    pub poly: &'a RandomPolynomial,
    pub chart: &'a ChartAtPoint,
    pub scale: f64,
}

impl ScalarField for ChartField<'_> {
    fn dim(&self) -> usize {
        self.chart.variety_dim()
    }

    fn eval(&self, u: &[f64]) -> f64 {
        let v: Vec<f64> = u.iter().map(|x| x / self.scale).collect();
        let mut y = vec![0.0; self.chart.ambient_dim() + 1];
        self.chart.exp(&v, &mut y);
        self.poly.eval_unit(&y)
    }
}

/// The random function whose zero set is examined.
#[derive(Debug, Clone, Copy)]
pub enum BarrierModel<'a> {
    /// `r` independent limit fields on `R^n`.
    Limit { spec: LimitKernelSpec, frequencies: usize, codim: usize },
    /// The polynomial ensemble read in the chart at `x` and scale `1/m`.
    Polynomial { ensemble: &'a Ensemble, chart: &'a ChartAtPoint },
}

impl BarrierModel<'_> {
    pub fn dim(&self) -> usize {
        match self {
            BarrierModel::Limit { spec, .. } => spec.eval_dim,
            BarrierModel::Polynomial { chart, .. } => chart.variety_dim(),
        }
    }

    pub fn codim(&self) -> usize {
        match self {
            BarrierModel::Limit { codim, .. } => *codim,
            BarrierModel::Polynomial { ensemble, .. } => ensemble.spec().codim,
        }
    }

    /// `None` for the limit field.
    pub fn degree(&self) -> Option<usize> {
        match self {
            BarrierModel::Limit { .. } => None,
            BarrierModel::Polynomial { ensemble, .. } => Some(ensemble.spec().degree),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierConfig {
    pub sigma: Sigma,
    pub mode: CountMode,
    /// Ball radii, all sharing the realizations of one grid on `[-R_max, R_max]^n`.
    pub radii: Vec<f64>,
    /// Grid points per axis.
    pub resolution: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierEstimate {
    pub radius: f64,
    /// `None` for the limit field.
    pub degree: Option<usize>,
    pub sigma: Sigma,
    pub successes: usize,
    /// Non-degenerate trials.
    pub trials: usize,
    pub degenerate: usize,
    /// Trials with unresolved cells (codimension ≥ 2 only).
    pub uncertain: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BarrierRun {
    pub estimates: Vec<BarrierEstimate>,
    /// Per trial, one event flag per radius.
    pub outcomes: Vec<TrialOutcome<Vec<bool>>>,
}

impl BarrierRun {
    /// The estimate with the largest Wilson lower bound.
    pub fn best(&self) -> Option<&BarrierEstimate> {
        self.estimates.iter().max_by(|a, b| a.ci_low.total_cmp(&b.ci_low))
    }
}

fn extract(fields: &[&dyn ScalarField], grid: &GridSpec) -> Result<ComponentReport> {
    if fields.len() == 1 {
        extract_components_hypersurface(&fields[0], grid)
    } else {
        extract_components_codim_r(fields, grid, &CodimOptions::default())
    }
}

/// Fraction of trials in which `B(0, R)` contains a closed component counted by
/// `N_Σ`, for every `R` in `config.radii`, with Wilson intervals.
///
/// Each trial is extracted once on the grid of the largest radius, so the event
/// is monotone in `R` trial by trial.
pub fn barrier_probability(model: &BarrierModel<'_>, config: &BarrierConfig, exec: &impl Executor) -> Result<BarrierRun> {
    let n = model.dim();
    let r = model.codim();
    if config.trials < MIN_TRIALS || config.radii.is_empty() || config.radii.iter().any(|&x| !(x > 0.0)) {
        return Err(invalid("barrier runs need at least 100 trials and positive radii"));
    }
    if r == 0 || r > n || config.sigma.dim() + r != n {
        return Err(invalid("Σ must have dimension n - r"));
    }
    let r_max = config.radii.iter().fold(0.0_f64, |a, &b| a.max(b));
    let grid = GridSpec::centered(n, r_max, config.resolution)?;
    if let BarrierModel::Polynomial { ensemble, .. } = model {
        let limit = core::f64::consts::PI * ensemble.spec().degree as f64;
        if r_max * (n as f64).sqrt() >= limit {
            return Err(Error::OutsideChart { radius: r_max * (n as f64).sqrt(), limit });
        }
    }
    let seed = StreamSeed::new(config.seed).child(tags::BARRIER);
    let origin = vec![0.0; n];
    let results: Vec<Result<TrialOutcome<(Vec<bool>, bool)>>> = exec.map_trials(config.trials, |i| {
        let mut rng = seed.trial(i as u64);
        let report = match model {
            BarrierModel::Limit { spec, frequencies, codim } => {
                let fields = sample_field_tuple(spec, *frequencies, *codim, &mut rng)?;
                let refs: Vec<&dyn ScalarField> = fields.iter().map(|f| f as &dyn ScalarField).collect();
                extract(&refs, &grid)
            }
            BarrierModel::Polynomial { ensemble, chart } => {
                let polys = ensemble.sample_tuple(r, &mut rng);
                let scale = ensemble.spec().degree as f64;
                let fields: Vec<ChartField<'_>> = polys.iter().map(|poly| ChartField { poly, chart, scale }).collect();
                let refs: Vec<&dyn ScalarField> = fields.iter().map(|f| f as &dyn ScalarField).collect();
                extract(&refs, &grid)
            }
        };
        match report {
            Ok(rep) => {
                let hits = config
                    .radii
                    .iter()
                    .map(|&radius| count_n_sigma(&rep.within_ball(&origin, radius), &config.sigma, config.mode) >= 1)
                    .collect();
                Ok(TrialOutcome::Ok((hits, !rep.is_certain())))
            }
            Err(Error::Degenerate(_)) => Ok(TrialOutcome::Degenerate),
            Err(e) => Err(e),
        }
    });
    let mut outcomes = Vec::with_capacity(config.trials);
    let mut uncertain = 0;
    for res in results {
        match res? {
            TrialOutcome::Ok((hits, unsure)) => {
                uncertain += unsure as usize;
                outcomes.push(TrialOutcome::Ok(hits));
            }
            TrialOutcome::Degenerate => outcomes.push(TrialOutcome::Degenerate),
        }
    }
    check_degeneracy(&outcomes)?;
    let valid = outcomes.iter().filter(|o| o.ok().is_some()).count();
    let estimates = config
        .radii
        .iter()
        .enumerate()
        .map(|(k, &radius)| {
            let successes = outcomes.iter().filter(|o| o.ok().is_some_and(|h| h[k])).count();
            let (ci_low, ci_high) = wilson_interval(successes, valid);
            BarrierEstimate {
                radius,
                degree: model.degree(),
                sigma: config.sigma.clone(),
                successes,
                trials: valid,
                degenerate: config.trials - valid,
                uncertain,
                p_hat: if valid == 0 { 0.0 } else { successes as f64 / valid as f64 },
                ci_low,
                ci_high,
            }
        })
        .collect();
    Ok(BarrierRun { estimates, outcomes })
}
