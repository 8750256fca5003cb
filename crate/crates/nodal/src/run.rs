//! Runs one experiment: validate, write the manifest, compute, write artifacts,
//! complete the manifest.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nodal_core::ensemble::{BasisKind, Ensemble, EnsembleSpec, MultiIndex};
use nodal_core::experiments::{
    barrier_probability, expected_count_scaling, kac_rice_zero_count, lower_bound_assembly, monte_carlo_zero_count, pack_balls, tags,
    AssemblyConfig, BarrierConfig, BarrierModel, Executor, ScalingConfig, SphereCounter, MIN_TRIALS,
};
use nodal_core::field::{sample_field_exact_grid, sample_field_spectral, GridSpec};
use nodal_core::func::ScalarField;
use nodal_core::kernel::{
    ball_grid, convergence_report, limit_kernel, limit_kernel_quadrature, ChartAtPoint, CovarianceKernel, LimitKernelSpec,
};
use nodal_core::rkhs::{fit_in_span, KernelTranslate, Mollifier, MollifierQuadrature};
use nodal_core::rng::StreamSeed;
use nodal_core::topology::{zero_surface, CountMode, QuotientMode, Sigma};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::manifest::{file_stem, Manifest, Status};
use crate::output::{float, RunFiles, Table};
use crate::params::{self, Experiment};

/// Largest grid accepted by the exact sampler.
const EXACT_GRID_LIMIT: usize = 10_000;

type Compute<'a> = Box<dyn FnOnce(&mut RunFiles) -> Result<Value> + 'a>;

/// A validated experiment: what the manifest records up front, and the work.
struct Prepared<'a> {
    context: Value,
    compute: Compute<'a>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

/// Validates, then writes the manifest before computing. Configuration errors
/// found during validation leave no files behind.
pub fn run(experiment: &Experiment, seed: u64, dir: &Path, exec: &impl Executor) -> Result<RunReport> {
    let prepared = prepare(experiment, seed, exec)?;
    let mut files = RunFiles::new(dir, file_stem(experiment, seed)?);
    files.create_dir()?;
    let manifest_path = files.manifest_path();
    let mut manifest = Manifest::new(experiment.clone(), seed, prepared.context);
    manifest.write(&manifest_path)?;
    match (prepared.compute)(&mut files) {
        Ok(results) => {
            let names: Vec<String> =
                files.written().iter().filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())).collect();
            manifest.status = Status::Complete;
            manifest.results = json!({ "artifacts": names, "aggregates": results });
            manifest.write(&manifest_path)?;
            Ok(RunReport { manifest: manifest_path, artifacts: files.written().to_vec() })
        }
        Err(e) => {
            manifest.fail(&e.record());
            manifest.write(&manifest_path)?;
            Err(e)
        }
    }
}

fn prepare<'a>(experiment: &'a Experiment, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    match experiment {
        Experiment::KernelCheck(p) => kernel_check(p, seed, exec),
        Experiment::FieldSample(p) => field_sample(p, seed, exec),
        Experiment::Barrier(p) => barrier(p, seed, exec),
        Experiment::Scaling(p) => scaling(p, seed, exec),
        Experiment::Packing(p) => packing(p, seed, exec),
        Experiment::Kacrice(p) => kacrice(p, seed, exec),
        Experiment::RkhsFit(p) => rkhs_fit(p, exec),
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::config(msg))
    }
}

fn basis_kind(b: params::Basis) -> BasisKind {
    match b {
        params::Basis::Auto => BasisKind::Auto,
        params::Basis::Monomial => BasisKind::Monomial,
        params::Basis::Harmonic => BasisKind::Harmonic,
    }
}

fn count_mode(m: params::Mode) -> CountMode {
    match m {
        params::Mode::Strict => CountMode::Strict,
        params::Mode::Grouped => CountMode::Grouped,
    }
}

fn to_value(v: &impl serde::Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn kernel_check<'a>(p: &'a params::KernelCheck, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    let limit = LimitKernelSpec::new(p.ambient_dim, p.variety_dim)?;
    require(!p.degrees.is_empty(), "--degrees must not be empty")?;
    for &m in &p.degrees {
        EnsembleSpec::new(p.ambient_dim, m, 1, p.variety_dim)?;
    }
    let min_degree = *p.degrees.iter().min().unwrap_or(&1) as f64;
    require(p.radius > 0.0 && p.radius / min_degree < PI, "--radius must be positive and below π times the smallest degree")?;
    require(p.per_axis >= 1, "--per-axis must be at least 1")?;
    require(p.oracle_extent > 0.0 && p.oracle_tol > 0.0, "oracle extent and tolerance must be positive")?;
    let chart = ChartAtPoint::north_pole(p.ambient_dim, p.variety_dim)?;
    let grid = ball_grid(p.variety_dim, p.radius, p.per_axis);
    let context = json!({ "limit": limit, "chart_base": chart.base(), "grid_points": grid.len(), "basis": p.basis });
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let n = p.variety_dim;
        let stream = StreamSeed::new(seed).child(tags::KERNEL_ORACLE);
        let pairs = exec.map_trials(p.oracle_pairs, |i| {
            let mut rng = stream.trial(i as u64);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-p.oracle_extent..p.oracle_extent)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-p.oracle_extent..p.oracle_extent)).collect();
            let d = u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            limit_kernel_quadrature(&limit, &u, &v, p.oracle_tol).map(|q| (d, limit_kernel(&limit, &u, &v), q))
        });
        let mut oracle = Table::new(".oracle", &["pair", "distance", "closed_form", "quadrature", "abs_difference"]);
        let mut max_diff = 0.0_f64;
        for (i, r) in pairs.into_iter().enumerate() {
            let (d, k, q) = r?;
            max_diff = max_diff.max((k - q).abs());
            oracle.push(vec![i.to_string(), float(d), float(k), float(q), float((k - q).abs())]);
        }
        files.write_table(&oracle)?;

        let kind = basis_kind(p.basis);
        let report = convergence_report(
            |m| Ok(Box::new(Ensemble::new(EnsembleSpec::new(p.ambient_dim, m, 1, n)?, kind)?) as Box<dyn CovarianceKernel>),
            &chart,
            &limit,
            &p.degrees,
            &grid,
        )?;
        let mut table = Table::new("", &["m", "sup_error", "sup_derivative_error", "constant"]);
        for row in &report.rows {
            table.push(vec![row.degree.to_string(), float(row.sup_error), float(row.sup_derivative_error), float(row.constant)]);
        }
        files.write_table(&table)?;
        files.write_json(".grid", &json!({ "points": report.grid }))?;
        Ok(json!({
            "calibration": report.calibration,
            "rows": report.rows,
            "oracle_max_abs_difference": max_diff,
        }))
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}

fn field_sample<'a>(p: &'a params::FieldSample, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    let spec = LimitKernelSpec::new(p.freq_dim.unwrap_or(p.dim), p.dim)?;
    let grid = GridSpec::centered(p.dim, p.radius, p.resolution)?;
    require(p.count >= 1 && p.frequencies >= 1, "--count and --frequencies must be at least 1")?;
    require(p.sampler == params::Sampler::Spectral || grid.len() <= EXACT_GRID_LIMIT, "the exact sampler is limited to 10^4 grid points")?;
    require(!p.off || p.dim == 3, "--off needs n = 3")?;
    let context = json!({ "spec": spec, "grid": grid, "sampler": p.sampler });
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let stream = StreamSeed::new(seed).child(tags::FIELD_SAMPLE);
        let samples = exec.map_trials(p.count, |i| -> nodal_core::Result<(Vec<f64>, f64)> {
            let mut rng = stream.trial(i as u64);
            match p.sampler {
                params::Sampler::Spectral => Ok((sample_field_spectral(&spec, p.frequencies, &mut rng)?.eval_grid(&grid), 0.0)),
                params::Sampler::Exact => sample_field_exact_grid(&grid, &spec, &mut rng).map(|s| (s.values, s.jitter)),
            }
        });
        let mut table = Table::new("", &["index", "mean", "variance", "min", "max", "jitter"]);
        let mut stats = Vec::new();
        for (i, s) in samples.into_iter().enumerate() {
            let (values, jitter) = s?;
            let len = values.len() as f64;
            let mean = values.iter().sum::<f64>() / len;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            table.push(vec![i.to_string(), float(mean), float(var), float(min), float(max), float(jitter)]);
            stats.push(json!({ "index": i, "mean": mean, "variance": var, "min": min, "max": max, "jitter": jitter }));
            if p.dump {
                let meta = json!({ "seed": seed, "index": i, "sampler": p.sampler, "spec": spec });
                files.write_grid_dump(&format!(".{i}"), &grid, &values, meta)?;
            }
            if p.off {
                files.write_off(&format!(".{i}"), &zero_surface(&grid, &values)?)?;
            }
        }
        files.write_table(&table)?;
        Ok(json!({ "samples": stats }))
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}

/// Spacing 1/8 below three dimensions and 1/4 from three on.
fn default_resolution(n: usize, r_max: f64) -> usize {
    let h = if n <= 2 { 0.125 } else { 0.25 };
    (2.0 * r_max / h).ceil() as usize + 1
}

fn barrier<'a>(p: &'a params::Barrier, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    let sigma = Sigma::parse(&p.sigma)?;
    require(p.trials >= MIN_TRIALS, "--trials must be at least 100")?;
    require(!p.radii.is_empty() && p.radii.iter().all(|&r| r > 0.0), "--R needs positive radii")?;
    require(p.codim >= 1 && p.codim <= p.dim, "--r must lie in [1, n]")?;
    require(sigma.dim() + p.codim == p.dim, "Σ must have dimension n - r")?;
    let big_n = p.ambient_dim.unwrap_or(p.dim);
    let r_max = p.radii.iter().fold(0.0_f64, |a, &b| a.max(b));
    let resolution = p.resolution.unwrap_or_else(|| default_resolution(p.dim, r_max));
    let grid = GridSpec::centered(p.dim, r_max, resolution)?;
    let config = BarrierConfig { sigma, mode: count_mode(p.mode), radii: p.radii.clone(), resolution, trials: p.trials, seed };
    let (context, ensemble_spec, limit_spec) = match p.model {
        params::Model::Limit => {
            let spec = LimitKernelSpec::new(big_n, p.dim)?;
            require(p.frequencies >= 1, "--frequencies must be at least 1")?;
            (json!({ "model": "limit", "spec": spec, "grid": grid }), None, Some(spec))
        }
        params::Model::Polynomial => {
            let m = p.degree.ok_or_else(|| CliError::config("the polynomial model needs --m"))?;
            let spec = EnsembleSpec::new(big_n, m, p.codim, p.dim)?;
            require(r_max * (p.dim as f64).sqrt() < PI * m as f64, "the grid leaves the chart: need R sqrt(n) < π m")?;
            let chart = ChartAtPoint::north_pole(big_n, p.dim)?;
            (json!({ "model": "polynomial", "spec": spec, "grid": grid, "chart_base": chart.base() }), Some(spec), None)
        }
    };
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let run = match (ensemble_spec, limit_spec) {
            (Some(spec), _) => {
                let ensemble = Ensemble::new(spec, BasisKind::Auto)?;
                let chart = ChartAtPoint::north_pole(big_n, p.dim)?;
                barrier_probability(&BarrierModel::Polynomial { ensemble: &ensemble, chart: &chart }, &config, exec)?
            }
            (None, Some(spec)) => {
                let model = BarrierModel::Limit { spec, frequencies: p.frequencies, codim: p.codim };
                barrier_probability(&model, &config, exec)?
            }
            (None, None) => unreachable!("one model is always prepared"),
        };
        let mut table = Table::new(
            "",
            &["R", "m", "sigma", "successes", "trials", "degenerate", "uncertain", "p_hat", "ci_low", "ci_high"],
        );
        for e in &run.estimates {
            table.push(vec![
                float(e.radius),
                e.degree.map_or_else(|| "limit".to_owned(), |m| m.to_string()),
                config.sigma.to_string(),
                e.successes.to_string(),
                e.trials.to_string(),
                e.degenerate.to_string(),
                e.uncertain.to_string(),
                float(e.p_hat),
                float(e.ci_low),
                float(e.ci_high),
            ]);
        }
        files.write_table(&table)?;
        to_value(&run)
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}

fn scaling<'a>(p: &'a params::Scaling, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    let n = p.variety_dim.unwrap_or(p.ambient_dim);
    let sigma = Sigma::parse(&p.sigma)?;
    require(!p.degrees.is_empty(), "--degrees must not be empty")?;
    require(p.trials >= 2, "--trials must be at least 2")?;
    require(sigma.dim() + 1 == n, "Σ must have dimension n - 1")?;
    for &m in &p.degrees {
        EnsembleSpec::new(p.ambient_dim, m, 1, n)?;
    }
    SphereCounter::new(n, p.resolution)?;
    let quotient = match p.quotient {
        params::Quotient::None => QuotientMode::None,
        params::Quotient::Antipodal => QuotientMode::Antipodal,
    };
    let config = ScalingConfig {
        ambient_dim: p.ambient_dim,
        variety_dim: n,
        degrees: p.degrees.clone(),
        sigma,
        mode: count_mode(p.mode),
        quotient,
        resolution: p.resolution,
        trials: p.trials,
        seed,
    };
    let context = json!({ "config": config });
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let result = expected_count_scaling(&config, exec)?;
        let mut table = Table::new("", &["m", "mean", "std_error", "trials", "degenerate"]);
        for r in &result.rows {
            table.push(vec![r.degree.to_string(), float(r.mean), float(r.std_error), r.trials.to_string(), r.degenerate.to_string()]);
        }
        files.write_table(&table)?;
        let mut fit = Table::new(".fit", &["slope", "slope_std_error", "intercept"]);
        fit.push(vec![float(result.slope), float(result.slope_std_error), float(result.intercept)]);
        files.write_table(&fit)?;
        to_value(&result)
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}

fn packing<'a>(p: &'a params::Packing, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    let radius = match (p.radius, p.degree, p.scaled_radius) {
        (Some(r), None, None) => r,
        (None, Some(m), Some(big_r)) if m >= 1 => big_r / m as f64,
        _ => return Err(CliError::config("give either --radius or both --m and --R")),
    };
    require(p.dim == 1 || p.dim == 2, "packings are available on S^1 and S^2")?;
    require(radius > 0.0 && radius < PI / 4.0, "the packing radius must lie in (0, π/4)")?;
    let assembly = if p.assemble {
        let (Some(m), Some(big_r)) = (p.degree, p.scaled_radius) else {
            return Err(CliError::config("--assemble needs --m and --R"));
        };
        let sigma = Sigma::parse(&p.sigma)?;
        require(sigma.dim() + 1 == p.dim, "Σ must have dimension n - 1")?;
        require(p.trials >= 2, "--trials must be at least 2")?;
        let big_n = p.ambient_dim.unwrap_or(p.dim);
        EnsembleSpec::new(big_n, m, 1, p.dim)?;
        SphereCounter::new(p.dim, p.resolution)?;
        Some(AssemblyConfig {
            ambient_dim: big_n,
            variety_dim: p.dim,
            degree: m,
            radius: big_r,
            sigma,
            mode: count_mode(p.mode),
            resolution: p.resolution,
            trials: p.trials,
            seed,
        })
    } else {
        None
    };
    let context = json!({ "radius": radius, "assembly": assembly });
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let packing = pack_balls(p.dim, radius)?;
        let probe = packing.coverage_probe(p.probes, &mut StreamSeed::new(seed).child(tags::PACKING_AUDIT).trial(0));
        let scaled = packing.count() as f64 * radius.powi(p.dim as i32);
        let separation = packing.min_separation();
        let mut summary = Table::new(
            "",
            &["n", "radius", "count", "count_times_radius_pow_n", "min_separation", "max_probe_distance", "covered"],
        );
        summary.push(vec![
            p.dim.to_string(),
            float(radius),
            packing.count().to_string(),
            float(scaled),
            float(separation),
            float(probe),
            (probe <= 2.0 * radius).to_string(),
        ]);
        files.write_table(&summary)?;
        let mut header = vec!["index".to_owned()];
        header.extend((0..=p.dim).map(|k| format!("x{k}")));
        let mut centers = Table { suffix: ".centers".into(), header, rows: Vec::new() };
        for (i, c) in packing.centers.iter().enumerate() {
            centers.push(std::iter::once(i.to_string()).chain(c.iter().map(|&x| float(x))).collect());
        }
        files.write_table(&centers)?;
        let mut results = json!({
            "count": packing.count(),
            "count_times_radius_pow_n": scaled,
            "min_separation": separation,
            "max_probe_distance": probe,
        });
        if let Some(config) = &assembly {
            let a = lower_bound_assembly(config, exec)?;
            let mut balls = Table::new(".balls", &["ball", "successes", "trials", "p_hat", "ci_low", "ci_high"]);
            for (i, e) in a.per_ball.iter().enumerate() {
                balls.push(vec![i.to_string(), e.successes.to_string(), e.trials.to_string(), float(e.p_hat), float(e.ci_low), float(e.ci_high)]);
            }
            files.write_table(&balls)?;
            let mut t = Table::new(
                ".assembly",
                &["m", "R", "balls", "mean_count", "mean_std_error", "barrier_sum", "barrier_sum_std_error", "holds", "holds_per_trial"],
            );
            t.push(vec![
                config.degree.to_string(),
                float(config.radius),
                a.packing.count().to_string(),
                float(a.mean_count),
                float(a.mean_std_error),
                float(a.barrier_sum),
                float(a.barrier_sum_std_error),
                a.holds.to_string(),
                a.holds_per_trial.to_string(),
            ]);
            files.write_table(&t)?;
            results["assembly"] = to_value(&a)?;
        }
        Ok(results)
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}

fn kacrice<'a>(p: &'a params::KacRice, seed: u64, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    require(!p.degrees.is_empty() && p.degrees.iter().all(|&m| m >= 1), "--degrees must be positive")?;
    require(p.trials >= 2, "--trials must be at least 2")?;
    require(p.points.is_none_or(|k| k >= 8), "--points must be at least 8")?;
    let points = |m: usize| p.points.unwrap_or((64 * m).max(256));
    let context = json!({ "points": p.degrees.iter().map(|&m| points(m)).collect::<Vec<_>>() });
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let mut table =
            Table::new("", &["m", "points", "kac_rice", "monte_carlo_mean", "monte_carlo_std_error", "relative_difference"]);
        let mut rows = Vec::new();
        for &m in &p.degrees {
            let ensemble = Ensemble::new(EnsembleSpec::hypersurface(1, m)?, BasisKind::Auto)?;
            let oracle = kac_rice_zero_count(&ensemble)?;
            let mc = monte_carlo_zero_count(&ensemble, points(m), p.trials, seed, exec)?;
            let rel = (mc.mean - oracle).abs() / oracle;
            table.push(vec![m.to_string(), points(m).to_string(), float(oracle), float(mc.mean), float(mc.std_error), float(rel)]);
            rows.push(json!({ "kac_rice": oracle, "relative_difference": rel, "monte_carlo": mc }));
        }
        files.write_table(&table)?;
        Ok(json!({ "rows": rows }))
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}

/// Targets of `rkhs-fit`.
#[derive(Debug, Clone)]
enum Target {
    Monomial(Vec<i64>),
    Translate(KernelTranslate),
}

impl Target {
    fn parse(text: &str, spec: LimitKernelSpec) -> Result<Self> {
        let numbers = |s: &str| -> Result<Vec<f64>> {
            s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| CliError::config(format!("bad number `{t}` in --target")))).collect()
        };
        let target = if let Some(rest) = text.strip_prefix("monomial:") {
            let k = numbers(rest)?;
            require(k.iter().all(|&e| e >= 0.0 && e.fract() == 0.0), "monomial exponents must be nonnegative integers")?;
            Target::Monomial(k.into_iter().map(|e| e as i64).collect())
        } else if let Some(rest) = text.strip_prefix("translate:") {
            Target::Translate(KernelTranslate { center: numbers(rest)?, spec })
        } else {
            return Err(CliError::config("--target must be `monomial:k1,...` or `translate:v1,...`"));
        };
        let len = match &target {
            Target::Monomial(k) => k.len(),
            Target::Translate(t) => t.center.len(),
        };
        require(len == spec.eval_dim, "--target must have n components")?;
        Ok(target)
    }
}

impl ScalarField for Target {
    fn dim(&self) -> usize {
        match self {
            Target::Monomial(k) => k.len(),
            Target::Translate(t) => t.dim(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Target::Monomial(k) => k.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product(),
            Target::Translate(t) => t.eval(x),
        }
    }
}

/// `per_axis^n` centers filling `[-extent, extent]^n`.
fn center_grid(n: usize, extent: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let coord = |i: usize| if per_axis == 1 { 0.0 } else { -extent + 2.0 * extent * i as f64 / (per_axis - 1) as f64 };
    (0..per_axis.pow(n as u32))
        .map(|flat| {
            let mut rem = flat;
            (0..n)
                .map(|_| {
                    let i = rem % per_axis;
                    rem /= per_axis;
                    coord(i)
                })
                .collect()
        })
        .collect()
}

fn rkhs_fit<'a>(p: &'a params::RkhsFit, exec: &'a impl Executor) -> Result<Prepared<'a>> {
    let spec = LimitKernelSpec::new(p.freq_dim.unwrap_or(p.dim), p.dim)?;
    let target = Target::parse(&p.target, spec)?;
    let grid = GridSpec::centered(p.dim, p.radius, p.resolution)?;
    require(!p.centers.is_empty() && p.centers.iter().all(|&c| c >= 1), "--centers must be positive")?;
    require(p.extent > 0.0 && p.ridge >= 0.0, "--extent must be positive and --ridge nonnegative")?;
    let exponents = match &target {
        Target::Monomial(k) => Some(MultiIndex::new(k)?),
        Target::Translate(_) => None,
    };
    require(p.mollifier.is_empty() || exponents.is_some(), "--mollifier needs a monomial target")?;
    require(p.mollifier.iter().all(|&t| t > 0.0 && t <= 1.0), "mollifier scales must lie in (0, 1]")?;
    require(p.nodes >= 2, "--nodes must be at least 2")?;
    let context = json!({ "spec": spec, "grid": grid });
    let compute = move |files: &mut RunFiles| -> Result<Value> {
        let mut table =
            Table::new("", &["per_axis", "centers", "ridge", "rcond", "fit_residual", "audit_residual", "coefficient_norm"]);
        let mut fits = Vec::new();
        for &c in &p.centers {
            let centers = center_grid(p.dim, p.extent, c);
            let fit = fit_in_span(&target, &centers, &spec, p.ridge, &grid)?;
            table.push(vec![
                c.to_string(),
                centers.len().to_string(),
                float(fit.ridge),
                float(fit.rcond),
                float(fit.fit_residual),
                float(fit.audit_residual),
                float(fit.coefficient_norm()),
            ]);
            fits.push(json!({
                "per_axis": c,
                "ridge": fit.ridge,
                "rcond": fit.rcond,
                "fit_residual": fit.fit_residual,
                "audit_residual": fit.audit_residual,
                "coefficients": fit.coefficients,
            }));
        }
        files.write_table(&table)?;
        let mut ladder = Vec::new();
        if let Some(k) = &exponents {
            let mut mt = Table::new(".mollifier", &["t", "sup_error"]);
            let mut p_buf = vec![0.0; p.dim];
            let points: Vec<Vec<f64>> = (0..grid.len())
                .filter_map(|i| {
                    grid.point(i, &mut p_buf);
                    (p_buf.iter().map(|x| x * x).sum::<f64>() <= p.radius * p.radius * (1.0 + 1e-12)).then(|| p_buf.clone())
                })
                .collect();
            for &t in &p.mollifier {
                let q = MollifierQuadrature::new(Mollifier::new(spec.freq_dim, t)?, p.nodes)?;
                let errs = exec.map_trials(points.len(), |i| (q.approximant(k, &points[i]) - target.eval(&points[i])).abs());
                let sup = errs.into_iter().fold(0.0, f64::max);
                mt.push(vec![float(t), float(sup)]);
                ladder.push(json!({ "t": t, "sup_error": sup }));
            }
            if !p.mollifier.is_empty() {
                files.write_table(&mt)?;
            }
        }
        Ok(json!({ "fits": fits, "mollifier": ladder }))
    };
    Ok(Prepared { context, compute: Box::new(compute) })
}
