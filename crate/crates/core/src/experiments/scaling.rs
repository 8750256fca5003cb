//! Component counts on whole spheres: growth of `E N_Σ` with the degree and
//! the packing lower bound `E N_Σ ≥ Σ_i P(ball i contains a component)`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::packing::{pack_balls, PackingResult};
use super::{check_degeneracy, mean_and_error, tags, weighted_line, wilson_interval, BarrierEstimate, Executor, TrialOutcome, Z95};
use crate::ensemble::{BasisKind, Ensemble, EnsembleSpec};
use crate::error::{invalid, Error, Result};
use crate::func::{Equatorial, SphereFunction};
use crate::rng::StreamSeed;
use crate::topology::{antipodal_quotient, count_n_sigma, extract_on_circle, ComponentReport, CountMode, CubeSphere, QuotientMode, Sigma};

/// Zero-set extraction on all of `S^1` (uniform angles) or `S^2` (cube-sphere).
#[derive(Debug, Clone)]
pub enum SphereCounter {
    Circle { points: usize },
    Cube(CubeSphere),
}

impl SphereCounter {
    /// `resolution` is the number of angles on `S^1` or points per cube edge on `S^2`.
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        match n {
            1 => Ok(SphereCounter::Circle { points: resolution }),
            2 => Ok(SphereCounter::Cube(CubeSphere::new(resolution)?)),
            _ => Err(invalid("whole-sphere counting is available on S^1 and S^2")),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SphereCounter::Circle { .. } => 1,
            SphereCounter::Cube(_) => 2,
        }
    }

    /// Components of the zero set of `f` on `S^n`, optionally in the quotient by `x ↦ -x`.
    pub fn report(&self, f: &impl SphereFunction, quotient: QuotientMode) -> Result<ComponentReport> {
        match self {
            SphereCounter::Circle { points } => {
                let mut rep = extract_on_circle(f, *points)?;
                if quotient == QuotientMode::Antipodal {
                    // Zeros of a homogeneous function come in antipodal pairs; keep
                    // the representative in the upper half-plane.
                    rep.components.retain(|c| c.points[1] > 0.0 || (c.points[1] == 0.0 && c.points[0] > 0.0));
                    rep.components.iter_mut().for_each(|c| c.antipodal_invariant = Some(false));
                    rep.quotient = QuotientMode::Antipodal;
                }
                Ok(rep)
            }
            SphereCounter::Cube(sphere) => {
                let ext = sphere.extract(f)?;
                match quotient {
                    QuotientMode::None => Ok(ext.report),
                    QuotientMode::Antipodal => antipodal_quotient(sphere, &ext),
                }
            }
        }
    }
}

fn restricted<'a, F: SphereFunction>(f: &'a F, n: usize) -> Equatorial<&'a F> {
    Equatorial::new(f, n + 1)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingConfig {
    pub ambient_dim: usize,
    pub variety_dim: usize,
    pub degrees: Vec<usize>,
    pub sigma: Sigma,
    pub mode: CountMode,
    pub quotient: QuotientMode,
    /// See [`SphereCounter::new`].
    pub resolution: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingRow {
    pub degree: usize,
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub degenerate: usize,
    pub counts: Vec<TrialOutcome<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    /// Weighted least-squares slope of `log mean` against `log m`, over rows
    /// with positive mean and error; NaN with fewer than two such rows.
    pub slope: f64,
    pub slope_std_error: f64,
    pub intercept: f64,
}

fn sphere_trial(
    ensemble: &Ensemble,
    counter: &SphereCounter,
    quotient: QuotientMode,
    seed: StreamSeed,
    i: usize,
) -> Result<TrialOutcome<ComponentReport>> {
    let p = ensemble.sample(&mut seed.trial(i as u64));
    let n = counter.dim();
    let rep = if ensemble.spec().ambient_dim > n {
        counter.report(&restricted(&p, n), quotient)
    } else {
        counter.report(&p, quotient)
    };
    match rep {
        Ok(r) => Ok(TrialOutcome::Ok(r)),
        Err(Error::Degenerate(_)) => Ok(TrialOutcome::Degenerate),
        Err(e) => Err(e),
    }
}

/// Monte Carlo `E N_Σ` on `S^n` for each degree, with a log-log slope fit.
pub fn expected_count_scaling(config: &ScalingConfig, exec: &impl Executor) -> Result<ScalingResult> {
    if config.degrees.is_empty() || config.degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("degrees must be increasing"));
    }
    if config.trials < 2 || config.sigma.dim() + 1 != config.variety_dim {
        return Err(invalid("scaling needs two or more trials and a Σ of dimension n - 1"));
    }
    let counter = SphereCounter::new(config.variety_dim, config.resolution)?;
    let base = StreamSeed::new(config.seed).child(tags::SCALING);
    let mut rows = Vec::with_capacity(config.degrees.len());
    for &m in &config.degrees {
        let spec = EnsembleSpec::new(config.ambient_dim, m, 1, config.variety_dim)?;
        let ensemble = Ensemble::new(spec, BasisKind::Auto)?;
        let seed = base.child(m as u64);
        let results = exec.map_trials(config.trials, |i| {
            sphere_trial(&ensemble, &counter, config.quotient, seed, i)
                .map(|o| match o {
                    TrialOutcome::Ok(rep) => TrialOutcome::Ok(count_n_sigma(&rep, &config.sigma, config.mode)),
                    TrialOutcome::Degenerate => TrialOutcome::Degenerate,
                })
        });
        let counts = results.into_iter().collect::<Result<Vec<_>>>()?;
        check_degeneracy(&counts)?;
        let values: Vec<f64> = counts.iter().filter_map(|c| c.ok().map(|&v| v as f64)).collect();
        let (mean, std_error) = mean_and_error(&values);
        rows.push(ScalingRow { degree: m, mean, std_error, trials: values.len(), degenerate: counts.len() - values.len(), counts });
    }
    let fit: Vec<&ScalingRow> = rows.iter().filter(|r| r.mean > 0.0 && r.std_error > 0.0).collect();
    let (intercept, slope, slope_std_error) = if fit.len() >= 2 {
        let x: Vec<f64> = fit.iter().map(|r| (r.degree as f64).ln()).collect();
        let y: Vec<f64> = fit.iter().map(|r| r.mean.ln()).collect();
        // Delta method: var(log mean) ≈ (se / mean)^2.
        let w: Vec<f64> = fit.iter().map(|r| (r.mean / r.std_error).powi(2)).collect();
        weighted_line(&x, &y, &w)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(ScalingResult { rows, slope, slope_std_error, intercept })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssemblyConfig {
    pub ambient_dim: usize,
    pub variety_dim: usize,
    pub degree: usize,
    /// Rescaled ball radius `R`; the balls on the sphere have radius `R/m`.
    pub radius: f64,
    pub sigma: Sigma,
    pub mode: CountMode,
    pub resolution: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssemblyResult {
    pub packing: PackingResult,
    pub per_ball: Vec<BarrierEstimate>,
    pub mean_count: f64,
    pub mean_std_error: f64,
    /// `Σ_i p̂_i` over the packing balls.
    pub barrier_sum: f64,
    pub barrier_sum_std_error: f64,
    /// `mean_count + z·sqrt(se_mean² + se_sum²) ≥ barrier_sum` at 95%.
    pub holds: bool,
    /// Per trial: `N_Σ` on the sphere is at least the number of balls holding a component.
    pub holds_per_trial: bool,
    /// Per trial: `(N_Σ, number of balls holding a component)`.
    pub outcomes: Vec<TrialOutcome<(usize, usize)>>,
}

/// Empirical check of `E N_Σ ≥ Σ_{i ∈ I_m} P(N_Σ(Z ∩ B(x_i, R/m)) ≥ 1)` over a
/// maximal packing, all estimated on the same realizations.
pub fn lower_bound_assembly(config: &AssemblyConfig, exec: &impl Executor) -> Result<AssemblyResult> {
    let m = config.degree;
    if m == 0 || config.trials < 2 || config.sigma.dim() + 1 != config.variety_dim {
        return Err(invalid("assembly needs a positive degree, two or more trials and a Σ of dimension n - 1"));
    }
    let ball = config.radius / m as f64;
    let packing = pack_balls(config.variety_dim, ball)?;
    let counter = SphereCounter::new(config.variety_dim, config.resolution)?;
    let ensemble = Ensemble::new(EnsembleSpec::new(config.ambient_dim, m, 1, config.variety_dim)?, BasisKind::Auto)?;
    let seed = StreamSeed::new(config.seed).child(tags::ASSEMBLY);
    let results = exec.map_trials(config.trials, |i| {
        sphere_trial(&ensemble, &counter, QuotientMode::None, seed, i).map(|o| match o {
            TrialOutcome::Ok(rep) => {
                let total = count_n_sigma(&rep, &config.sigma, config.mode);
                let hits: Vec<bool> = packing
                    .centers
                    .iter()
                    .map(|c| {
                        count_n_sigma(&rep.within_cap(c, ball), &config.sigma, config.mode) >= 1
                    })
                    .collect();
                TrialOutcome::Ok((total, hits))
            }
            TrialOutcome::Degenerate => TrialOutcome::Degenerate,
        })
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    check_degeneracy(&results)?;
    let valid: Vec<&(usize, Vec<bool>)> = results.iter().filter_map(|o| o.ok()).collect();
    let totals: Vec<f64> = valid.iter().map(|(t, _)| *t as f64).collect();
    let (mean_count, mean_std_error) = mean_and_error(&totals);
    let nv = valid.len();
    let per_ball: Vec<BarrierEstimate> = (0..packing.count())
        .map(|b| {
            let successes = valid.iter().filter(|(_, h)| h[b]).count();
            let (ci_low, ci_high) = wilson_interval(successes, nv);
            BarrierEstimate {
                radius: config.radius,
                degree: Some(m),
                sigma: config.sigma.clone(),
                successes,
                trials: nv,
                degenerate: results.len() - nv,
                uncertain: 0,
                p_hat: successes as f64 / nv as f64,
                ci_low,
                ci_high,
            }
        })
        .collect();
    let barrier_sum: f64 = per_ball.iter().map(|e| e.p_hat).sum();
    let barrier_sum_std_error = per_ball.iter().map(|e| e.p_hat * (1.0 - e.p_hat) / nv as f64).sum::<f64>().sqrt();
    let holds = mean_count + Z95 * (mean_std_error.powi(2) + barrier_sum_std_error.powi(2)).sqrt() >= barrier_sum;
    let holds_per_trial = valid.iter().all(|(t, h)| h.iter().filter(|&&x| x).count() <= *t);
    let outcomes = results
        .iter()
        .map(|o| match o {
            TrialOutcome::Ok((t, h)) => TrialOutcome::Ok((*t, h.iter().filter(|&&x| x).count())),
            TrialOutcome::Degenerate => TrialOutcome::Degenerate,
        })
        .collect();
    Ok(AssemblyResult {
        packing,
        per_ball,
        mean_count,
        mean_std_error,
        barrier_sum,
        barrier_sum_std_error,
        holds,
        holds_per_trial,
        outcomes,
    })
}
