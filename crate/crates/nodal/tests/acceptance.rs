//! Acceptance suite. Every criterion runs through the same entry points as the
//! `nodal` binary and prints one PASS or FAIL line. Failures make the process
//! exit non-zero only in strict mode (`--strict` or `NODAL_ACCEPTANCE_STRICT=1`).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nodal::exec::RayonExecutor;
use nodal::params::Experiment;
use nodal::run::run;
use nodal_core::experiments::PACKING_CONSTANT;
use nodal_core::field::GridSpec;
use nodal_core::func::{FnField, ScalarField};
use nodal_core::topology::{
    count_n_sigma, extract_components_codim_r, extract_components_hypersurface, CodimOptions, CountMode, Sigma, Signature,
};
use serde_json::Value;

const SEED: u64 = 7;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

struct Runner {
    dir: tempfile::TempDir,
    exec: RayonExecutor,
}

impl Runner {
    fn sub(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Runs `args` (as on the command line, without the binary name) into
    /// `dir` and returns the aggregates recorded in the manifest.
    fn run_in(&self, dir: &Path, args: &[&str]) -> Result<(Value, PathBuf), String> {
        let experiment = parse(args)?;
        let report = run(&experiment, SEED, dir, &self.exec).map_err(|e| format!("{args:?}: {e}"))?;
        let text = fs::read_to_string(&report.manifest).map_err(|e| e.to_string())?;
        let manifest: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        Ok((manifest["results"]["aggregates"].clone(), report.manifest))
    }

    fn run(&self, args: &[&str]) -> Result<Value, String> {
        self.run_in(&self.sub("runs"), args).map(|(v, _)| v)
    }
}

fn parse(args: &[&str]) -> Result<Experiment, String> {
    use clap::Parser;
    #[derive(Parser)]
    struct Wrap {
        #[command(subcommand)]
        experiment: Experiment,
    }
    Wrap::try_parse_from(std::iter::once("nodal").chain(args.iter().copied()))
        .map(|w| w.experiment)
        .map_err(|e| e.to_string())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn kernel_oracle(r: &Runner) -> Outcome {
    let mut worst = 0.0_f64;
    for n in ["1", "2", "3"] {
        let agg = r.run(&["kernel-check", "--N", n, "--n", n, "--degrees", "10", "--per-axis", "3", "--oracle-pairs", "100"])?;
        let diff = f(&agg["oracle_max_abs_difference"]);
        check(diff < 1e-8, format!("N = {n}: closed form and quadrature differ by {diff:e}"))?;
        worst = worst.max(diff);
    }
    // N = 1 against 2 sin(d) / d, read back from the oracle table.
    let dir = r.sub("runs");
    let oracle = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".oracle.csv"))
        .find(|p| {
            let m = fs::read_to_string(p.to_string_lossy().replace(".oracle.csv", ".manifest.json")).unwrap_or_default();
            serde_json::from_str::<Value>(&m).is_ok_and(|v| v["parameters"]["N"] == 1)
        })
        .ok_or("no oracle table for N = 1")?;
    let mut reader = csv::Reader::from_path(&oracle).map_err(|e| e.to_string())?;
    let mut sinc = 0.0_f64;
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let d: f64 = rec[1].parse().map_err(|_| "bad distance")?;
        let k: f64 = rec[2].parse().map_err(|_| "bad kernel value")?;
        let exact = if d == 0.0 { 2.0 } else { 2.0 * d.sin() / d };
        sinc = sinc.max((k - exact).abs());
    }
    check(sinc < 1e-14, format!("N = 1 deviates from 2 sin(d)/d by {sinc:e}"))?;
    Ok(format!("max |closed - quadrature| = {worst:.2e}, max |K - 2 sin d/d| = {sinc:.2e}"))
}

fn covariance_universality(r: &Runner) -> Outcome {
    let mut notes = Vec::new();
    for (big_n, n) in [("1", "1"), ("2", "2"), ("2", "1")] {
        let agg = r.run(&["kernel-check", "--N", big_n, "--n", n, "--oracle-pairs", "1"])?;
        let errs: Vec<f64> = agg["rows"].as_array().ok_or("no rows")?.iter().map(|row| f(&row["sup_error"])).collect();
        check(errs.len() == 4, "expected four degrees")?;
        check(errs.windows(2).all(|w| w[1] < w[0]), format!("(N, n) = ({big_n}, {n}): errors {errs:?} do not decrease"))?;
        let s = f(&agg["calibration"]["scale_exponent"]);
        notes.push(format!("({big_n},{n}) s={s} sup_err {:.1e}->{:.1e}", errs[0], errs[3]));
    }
    Ok(notes.join("; "))
}

fn kac_rice(r: &Runner) -> Outcome {
    let agg = r.run(&["kacrice", "--degrees", "1,5,10,20,40", "--trials", "10000"])?;
    let rows = agg["rows"].as_array().ok_or("no rows")?;
    let one = &rows[0]["monte_carlo"];
    check(f(&one["mean"]) == 2.0 && f(&one["std_error"]) == 0.0, format!("m = 1 gives mean {} ± {}", one["mean"], one["std_error"]))?;
    let mut worst = 0.0_f64;
    for (m, row) in [5, 10, 20, 40].iter().zip(&rows[1..]) {
        let rel = f(&row["relative_difference"]);
        check(rel < 0.02, format!("m = {m}: relative difference {rel:.4}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("m=1 gives exactly 2; worst relative difference {worst:.4}"))
}

fn scaling_law(r: &Runner) -> Outcome {
    let control = r.run(&["scaling", "--N", "2", "--degrees", "1", "--trials", "200"])?;
    let row = &control["rows"][0];
    check(f(&row["mean"]) == 1.0 && f(&row["std_error"]) == 0.0, format!("m = 1 control: {row}"))?;
    let agg = r.run(&["scaling", "--N", "2", "--degrees", "5,10,20,40", "--trials", "200", "--resolution", "257"])?;
    let slope = f(&agg["slope"]);
    let means: Vec<String> = agg["rows"].as_array().ok_or("no rows")?.iter().map(|row| format!("{:.2}", f(&row["mean"]))).collect();
    let detail = format!("slope {slope:.3} ± {:.3}, means [{}]", f(&agg["slope_std_error"]), means.join(", "));
    check((1.7..=2.3).contains(&slope), format!("{detail} outside [1.7, 2.3]"))?;
    Ok(detail)
}

fn monotone(outcomes: &Value) -> bool {
    outcomes.as_array().is_some_and(|v| {
        v.iter().all(|o| match o.get("ok").and_then(Value::as_array) {
            Some(flags) => flags.windows(2).all(|w| w[0].as_bool() <= w[1].as_bool()),
            None => true,
        })
    })
}

fn barrier_positivity(r: &Runner) -> Outcome {
    let mut notes = Vec::new();
    for (n, sigma, radii) in [("2", "circle", "3,6,9"), ("3", "sphere", "3,6")] {
        let agg = r.run(&["barrier", "--n", n, "--sigma", sigma, "--R", radii, "--trials", "1000"])?;
        check(monotone(&agg["outcomes"]), format!("{sigma}: per-trial event not monotone in R"))?;
        let at6 = agg["estimates"]
            .as_array()
            .ok_or("no estimates")?
            .iter()
            .find(|e| f(&e["radius"]) == 6.0)
            .ok_or("no estimate at R = 6")?;
        let (k, low) = (at6["successes"].as_u64().unwrap_or(0), f(&at6["ci_low"]));
        notes.push(format!("{sigma} n={n} R=6: {k}/1000, ci_low {low:.2e}"));
        check(low > 0.0, notes.join("; "))?;
    }
    Ok(notes.join("; ") + "; monotone in R")
}

fn assembly(r: &Runner) -> Outcome {
    let agg = r.run(&["packing", "--n", "2", "--m", "20", "--R", "3", "--assemble", "--trials", "200", "--probes", "1000"])?;
    let a = &agg["assembly"];
    check(a["holds"] == true, format!("mean {} below barrier sum {}", a["mean_count"], a["barrier_sum"]))?;
    let mut least = f64::INFINITY;
    for m in 4..=64 {
        let agg = r.run(&["packing", "--n", "2", "--m", &m.to_string(), "--R", "3", "--probes", "1000"])?;
        let scaled = f(&agg["count_times_radius_pow_n"]);
        check(scaled >= PACKING_CONSTANT, format!("m = {m}: count r² = {scaled:.3}"))?;
        check(f(&agg["max_probe_distance"]) <= 6.0 / m as f64, format!("m = {m}: doubled balls do not cover"))?;
        least = least.min(scaled);
    }
    Ok(format!(
        "m=20: mean N {:.2} vs Σp̂ {:.2}; min count·r² over m=4..64 is {least:.3} ≥ {PACKING_CONSTANT}",
        f(&a["mean_count"]),
        f(&a["barrier_sum"])
    ))
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn topology_fixtures(_: &Runner) -> Outcome {
    let err = |e: nodal_core::Error| e.to_string();
    let circle = FnField::new(2, |x: &[f64]| norm2(x) - 1.0);
    for res in [65, 129, 257] {
        let rep = extract_components_hypersurface(&circle, &GridSpec::centered(2, 2.0, res).map_err(err)?).map_err(err)?;
        check(rep.closed_count() == 1 && rep.components[0].signature == Signature::circle(), format!("circle at {res}"))?;
    }
    let empty = FnField::new(3, |x: &[f64]| norm2(x) + 1.0);
    let rep = extract_components_hypersurface(&empty, &GridSpec::centered(3, 2.0, 17).map_err(err)?).map_err(err)?;
    check(rep.components.is_empty(), "empty fixture has components")?;

    let torus = FnField::new(3, |x: &[f64]| {
        let s = norm2(x) + 1.0 - 0.16;
        s * s - 4.0 * (x[0] * x[0] + x[1] * x[1])
    });
    let sphere = FnField::new(3, |x: &[f64]| norm2(x) - 1.0);
    for (name, field, expect, res) in [("torus", &torus as &dyn ScalarField, Signature::torus(), 49), ("sphere", &sphere, Signature::sphere(), 21)] {
        let mut r = res;
        for _ in 0..3 {
            let rep = extract_components_hypersurface(&field, &GridSpec::centered(3, 2.0, r).map_err(err)?).map_err(err)?;
            check(
                rep.components.len() == 1 && rep.components[0].closed && rep.components[0].signature == expect,
                format!("{name} at resolution {r}"),
            )?;
            check(expect.orientable && rep.components[0].signature.orientable, format!("{name} orientability"))?;
            r = 2 * r - 1;
        }
    }
    let two = FnField::new(2, |x: &[f64]| ((x[0] - 0.9).powi(2) + x[1] * x[1] - 0.3) * ((x[0] + 0.9).powi(2) + x[1] * x[1] - 0.3));
    let mut res = 33;
    for _ in 0..3 {
        let rep = extract_components_hypersurface(&two, &GridSpec::centered(2, 2.0, res).map_err(err)?).map_err(err)?;
        check(count_n_sigma(&rep, &Sigma::parse("circle").map_err(err)?, CountMode::Strict) == 2, format!("two circles at {res}"))?;
        res = 2 * res - 1;
    }
    let plane = FnField::new(3, |x: &[f64]| x[2] - 0.5);
    let fs: [&dyn ScalarField; 2] = [&sphere, &plane];
    let rep =
        extract_components_codim_r(&fs, &GridSpec::centered(3, 2.0, 33).map_err(err)?, &CodimOptions::default()).map_err(err)?;
    check(rep.components.len() == 1 && rep.components[0].signature == Signature::circle(), "sphere ∩ plane")?;
    Ok("circle, empty, torus, sphere, two circles and sphere ∩ plane exact through two refinements".into())
}

fn rkhs(r: &Runner) -> Outcome {
    let agg = r.run(&["rkhs-fit", "--n", "2", "--target", "translate:0.5,0.5", "--centers", "3", "--extent", "0.5", "--resolution", "41"])?;
    let exact = f(&agg["fits"][0]["audit_residual"]);
    check(exact < 1e-10, format!("span member recovered to {exact:e}"))?;

    let agg = r.run(&["rkhs-fit", "--centers", "25,49,97"])?;
    let res: Vec<f64> = agg["fits"].as_array().ok_or("no fits")?.iter().map(|fit| f(&fit["audit_residual"])).collect();
    check(res[0] < 1e-2, format!("x1 with 25 centers: {:e}", res[0]))?;
    check(res.windows(2).all(|w| w[1] < w[0]), format!("x1 residuals {res:?} do not decrease"))?;

    let mut targets = Vec::new();
    for a in 0..=4 {
        targets.push(format!("monomial:{a}"));
        for b in 0..=4 - a {
            targets.push(format!("monomial:{a},{b}"));
        }
    }
    for t in &targets {
        let n = if t.contains(',') { "2" } else { "1" };
        let agg = r.run(&["rkhs-fit", "--n", n, "--target", t, "--centers", "1", "--resolution", "25", "--mollifier", "0.5,0.25,0.125"])?;
        let errs: Vec<f64> = agg["mollifier"].as_array().ok_or("no ladder")?.iter().map(|e| f(&e["sup_error"])).collect();
        check(errs.windows(2).all(|w| w[1] < w[0]), format!("{t}: mollifier errors {errs:?} do not decrease"))?;
    }
    Ok(format!(
        "span member to {exact:.1e}; x1 residuals {:.2e} > {:.2e} > {:.2e}; ladder decreasing for {} monomials",
        res[0],
        res[1],
        res[2],
        targets.len()
    ))
}

fn reproducibility(r: &Runner) -> Outcome {
    use clap::Parser;
    let cases: [&[&str]; 8] = [
        &["kernel-check", "--N", "2", "--n", "1", "--degrees", "10,20", "--oracle-pairs", "10"],
        &["field-sample", "--n", "2", "--resolution", "33", "--count", "3"],
        &["barrier", "--n", "2", "--R", "2,3", "--trials", "100", "--resolution", "49", "--frequencies", "128"],
        &["barrier", "--model", "polynomial", "--n", "2", "--m", "10", "--R", "3", "--resolution", "33", "--trials", "100"],
        &["scaling", "--N", "2", "--degrees", "3,6", "--resolution", "65", "--trials", "40"],
        &["packing", "--n", "2", "--m", "6", "--R", "3", "--assemble", "--resolution", "33", "--trials", "20"],
        &["kacrice", "--degrees", "1,5", "--trials", "500"],
        &["rkhs-fit", "--centers", "9,17", "--resolution", "41", "--mollifier", "0.5,0.25"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let first = r.sub(&format!("repro-{i}"));
        let (_, manifest) = r.run_in(&first, args)?;
        for threads in ["1", "3"] {
            let out = r.sub(&format!("repro-{i}-replay-{threads}"));
            let cli = nodal::cli::Cli::try_parse_from([
                "nodal",
                "replay",
                manifest.to_str().ok_or("path is not UTF-8")?,
                "--verify",
                "--threads",
                threads,
                "--output-dir",
                out.to_str().ok_or("path is not UTF-8")?,
            ])
            .map_err(|e| e.to_string())?;
            let outcome = nodal::cli::execute(&cli).map(|_| ());
            check(outcome.is_ok(), format!("{} replay on {threads} threads: {outcome:?}", args[0]))?;
        }
    }
    Ok(format!("{} runs replayed byte-identically on 1 and 3 threads", cases.len()))
}

fn main() {
    let runner = Runner {
        dir: tempfile::tempdir().expect("temporary directory"),
        exec: RayonExecutor::new(None).expect("thread pool"),
    };
    let criteria: [(&str, fn(&Runner) -> Outcome); 9] = [
        ("kernel oracle agreement", kernel_oracle),
        ("covariance universality", covariance_universality),
        ("Kac-Rice pipeline audit", kac_rice),
        ("scaling law", scaling_law),
        ("barrier positivity", barrier_positivity),
        ("lower-bound assembly", assembly),
        ("topology fixtures", topology_fixtures),
        ("RKHS approximation", rkhs),
        ("reproducibility", reproducibility),
    ];
    // Optional criterion numbers select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let strict = std::env::args().any(|a| a == "--strict") || std::env::var_os("NODAL_ACCEPTANCE_STRICT").is_some_and(|v| v == "1");
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = criterion(&runner);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    let ran = if only.is_empty() { criteria.len() } else { only.len() };
    println!("{} of {ran} criteria passed", ran - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
