//! Typed parameters of every experiment. The same structs are parsed from the
//! command line and (with unknown keys rejected) from a manifest on replay.

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Auto,
    Monomial,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Limit,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Grouped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quotient {
    None,
    Antipodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    Spectral,
    Exact,
}

/// One experiment with its parameters.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "parameters", rename_all = "kebab-case")]
pub enum Experiment {
    /// Closed-form limit kernel against quadrature, and convergence of rescaled covariances.
    KernelCheck(KernelCheck),
    /// Realizations of the limit field on a grid.
    FieldSample(FieldSample),
    /// Probability that a ball contains a closed component of type Σ.
    Barrier(Barrier),
    /// Growth of the expected component count with the degree.
    Scaling(Scaling),
    /// Packings of the sphere, optionally with the lower-bound assembly.
    Packing(Packing),
    /// Kac–Rice oracle against Monte Carlo zero counts on the circle.
    Kacrice(KacRice),
    /// Least-squares fits in the span of kernel translates.
    RkhsFit(RkhsFit),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::KernelCheck(_) => "kernel-check",
            Experiment::FieldSample(_) => "field-sample",
            Experiment::Barrier(_) => "barrier",
            Experiment::Scaling(_) => "scaling",
            Experiment::Packing(_) => "packing",
            Experiment::Kacrice(_) => "kacrice",
            Experiment::RkhsFit(_) => "rkhs-fit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct KernelCheck {
    /// Ambient dimension N.
    #[arg(long = "N", default_value_t = 2)]
    #[serde(rename = "N")]
    pub ambient_dim: usize,
    /// Variety dimension n.
    #[arg(long = "n", default_value_t = 2)]
    #[serde(rename = "n")]
    pub variety_dim: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    pub degrees: Vec<usize>,
    /// Radius of the comparison ball in rescaled units.
    #[arg(long, default_value_t = 3.0)]
    pub radius: f64,
    /// Grid points per axis, clipped to the ball.
    #[arg(long, default_value_t = 9)]
    pub per_axis: usize,
    #[arg(long, value_enum, default_value_t = Basis::Auto)]
    pub basis: Basis,
    /// Random pairs for the quadrature oracle.
    #[arg(long, default_value_t = 100)]
    pub oracle_pairs: usize,
    /// Pairs are drawn uniformly in `[-extent, extent]^n`.
    #[arg(long, default_value_t = 5.0)]
    pub oracle_extent: f64,
    #[arg(long, default_value_t = 1e-11)]
    pub oracle_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FieldSample {
    /// Frequency dimension N (defaults to n).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub freq_dim: Option<usize>,
    #[arg(long = "n", default_value_t = 2)]
    #[serde(rename = "n")]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = Sampler::Spectral)]
    pub sampler: Sampler,
    #[arg(long, default_value_t = 512)]
    pub frequencies: usize,
    #[arg(long, default_value_t = 5.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 65)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Write each realization as flat little-endian f64 with a JSON sidecar.
    #[arg(long)]
    pub dump: bool,
    /// Write the zero surface of each realization as an OFF mesh (n = 3).
    #[arg(long)]
    pub off: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Barrier {
    #[arg(long, value_enum, default_value_t = Model::Limit)]
    pub model: Model,
    /// Frequency (limit) or ambient (polynomial) dimension N; defaults to n.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub ambient_dim: Option<usize>,
    #[arg(long = "n", default_value_t = 2)]
    #[serde(rename = "n")]
    pub dim: usize,
    /// Codimension r.
    #[arg(long = "r", default_value_t = 1)]
    #[serde(rename = "r")]
    pub codim: usize,
    /// Degree m, required for the polynomial model.
    #[arg(long = "m")]
    #[serde(rename = "m")]
    pub degree: Option<usize>,
    /// `circle`, `sphere`, `torus`, `genus:g`, `nonorientable:k`, `point` or `multi:[...]`.
    #[arg(long, default_value = "circle")]
    pub sigma: String,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    pub mode: Mode,
    /// Ball radii in rescaled units.
    #[arg(long = "R", value_delimiter = ',', default_value = "3,6,9")]
    #[serde(rename = "R")]
    pub radii: Vec<f64>,
    /// Grid points per axis (default: spacing 1/8 for n ≤ 2, 1/4 above).
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Spectral frequencies of the limit model.
    #[arg(long, default_value_t = 512)]
    pub frequencies: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Scaling {
    #[arg(long = "N", default_value_t = 2)]
    #[serde(rename = "N")]
    pub ambient_dim: usize,
    /// Defaults to N.
    #[arg(long = "n")]
    #[serde(rename = "n")]
    pub variety_dim: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub degrees: Vec<usize>,
    #[arg(long, default_value = "circle")]
    pub sigma: String,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Quotient::None)]
    pub quotient: Quotient,
    /// Angles on S^1 or points per cube edge on S^2.
    #[arg(long, default_value_t = 257)]
    pub resolution: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Packing {
    #[arg(long = "n", default_value_t = 2)]
    #[serde(rename = "n")]
    pub dim: usize,
    /// Geodesic radius; alternatively give both `--m` and `--R` for radius R/m.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long = "m")]
    #[serde(rename = "m")]
    pub degree: Option<usize>,
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub scaled_radius: Option<f64>,
    /// Random probes of the covering property.
    #[arg(long, default_value_t = 10_000)]
    pub probes: usize,
    /// Run the lower-bound assembly on the packing (needs `--m` and `--R`).
    #[arg(long)]
    pub assemble: bool,
    /// Ambient dimension N of the assembly ensemble (defaults to n).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub ambient_dim: Option<usize>,
    #[arg(long, default_value = "circle")]
    pub sigma: String,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    pub mode: Mode,
    #[arg(long, default_value_t = 257)]
    pub resolution: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct KacRice {
    #[arg(long, value_delimiter = ',', default_value = "1,5,10,20,40")]
    pub degrees: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Sample angles per trial (default: max(64 m, 256)).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RkhsFit {
    #[arg(long = "n", default_value_t = 1)]
    #[serde(rename = "n")]
    pub dim: usize,
    /// Frequency dimension N (defaults to n).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub freq_dim: Option<usize>,
    /// `monomial:k1,...,kn` or `translate:v1,...,vn`.
    #[arg(long, default_value = "monomial:1")]
    pub target: String,
    /// Radius of the fitting ball.
    #[arg(long = "R", default_value_t = 2.0)]
    #[serde(rename = "R")]
    pub radius: f64,
    /// Fitting grid points per axis.
    #[arg(long, default_value_t = 201)]
    pub resolution: usize,
    /// Centers per axis, one fit each.
    #[arg(long, value_delimiter = ',', default_value = "25,49,97")]
    pub centers: Vec<usize>,
    /// Centers fill `[-extent, extent]^n`.
    #[arg(long, default_value_t = 4.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    /// Mollifier scales compared against a monomial target.
    #[arg(long, value_delimiter = ',')]
    pub mollifier: Vec<f64>,
    /// Quadrature nodes per frequency axis for the mollifier.
    #[arg(long, default_value_t = 48)]
    pub nodes: usize,
}
