//! Zero sets on grids: extraction, connected components, topological
//! signatures and the count `N_Σ` of components of a prescribed type.

mod codim;
mod contour;
mod planar;
mod sphere;
mod surface;
mod union_find;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::field::GridSpec;

pub use codim::{extract_components_codim_r, sign_cell_clusters, CodimOptions};
pub use planar::{extract_components_hypersurface, extract_from_values, zero_surface, GRID_ZERO_TOLERANCE, MAX_OFFSET_ATTEMPTS, OFFSET_FRACTION};
pub use sphere::{antipodal_quotient, extract_on_circle, quotient_by_identification, CubeSphere, SphereExtraction};
pub use surface::TriangleMesh;
pub use union_find::UnionFind;

/// Diffeomorphism type of a closed connected manifold of dimension at most 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Signature {
    pub dim: usize,
    pub euler: i64,
    /// Meaningful for `dim = 2`; always true below.
    pub orientable: bool,
}

impl Signature {
    pub const fn point() -> Self {
        Self { dim: 0, euler: 1, orientable: true }
    }

    pub const fn circle() -> Self {
        Self { dim: 1, euler: 0, orientable: true }
    }

    pub const fn sphere() -> Self {
        Self::genus(0)
    }

    pub const fn torus() -> Self {
        Self::genus(1)
    }

    /// Closed orientable surface of genus `g`.
    pub const fn genus(g: i64) -> Self {
        Self { dim: 2, euler: 2 - 2 * g, orientable: true }
    }

    /// Connected sum of `k ≥ 1` projective planes.
    pub const fn nonorientable(k: i64) -> Self {
        Self { dim: 2, euler: 2 - k, orientable: false }
    }

    /// Whether the invariants describe a closed manifold that exists.
    pub fn is_realizable(&self) -> bool {
        match self.dim {
            0 => self.euler == 1,
            1 => self.euler == 0,
            2 if self.orientable => self.euler <= 2 && self.euler % 2 == 0,
            2 => self.euler <= 1,
            _ => false,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.dim, self.orientable) {
            (0, _) => write!(f, "point"),
            (1, _) => write!(f, "circle"),
            (2, true) if self.euler == 2 => write!(f, "sphere"),
            (2, true) if self.euler == 0 => write!(f, "torus"),
            (2, true) => write!(f, "genus:{}", (2 - self.euler) / 2),
            (2, false) => write!(f, "nonorientable:{}", 2 - self.euler),
            _ => write!(f, "dim{}:chi{}", self.dim, self.euler),
        }
    }
}

/// The model manifold `Σ`: connected, or a disjoint union of pieces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sigma {
    Connected(Signature),
    Multi(Vec<Signature>),
}

impl Sigma {
    /// Parses `circle`, `sphere`, `torus`, `point`, `genus:g`,
    /// `nonorientable:k` and `multi:[a,b,...]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("multi:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| invalid(format!("expected multi:[...] in {t:?}")))?;
            let pieces = split_top_level(inner)
                .into_iter()
                .map(|p| match Sigma::parse(p)? {
                    Sigma::Connected(s) => Ok(alloc::vec![s]),
                    Sigma::Multi(v) => Ok(v),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut flat: Vec<Signature> = pieces.into_iter().flatten().collect();
            if flat.is_empty() {
                return Err(invalid("multi:[] needs at least one piece"));
            }
            flat.sort();
            if flat.iter().any(|s| s.dim != flat[0].dim) {
                return Err(invalid("pieces of Σ must share one dimension"));
            }
            return Ok(if flat.len() == 1 { Sigma::Connected(flat[0]) } else { Sigma::Multi(flat) });
        }
        let sig = match t {
            "point" => Signature::point(),
            "circle" => Signature::circle(),
            "sphere" => Signature::sphere(),
            "torus" => Signature::torus(),
            _ => {
                let (head, num) = t.split_once(':').ok_or_else(|| invalid(format!("unknown Σ {t:?}")))?;
                let k: i64 = num.trim().parse().map_err(|_| invalid(format!("bad integer in Σ {t:?}")))?;
                match head {
                    "genus" if k >= 0 => Signature::genus(k),
                    "nonorientable" if k >= 1 => Signature::nonorientable(k),
                    _ => return Err(invalid(format!("unknown Σ {t:?}"))),
                }
            }
        };
        Ok(Sigma::Connected(sig))
    }

    pub fn dim(&self) -> usize {
        match self {
            Sigma::Connected(s) => s.dim,
            Sigma::Multi(v) => v[0].dim,
        }
    }

    /// Pieces with multiplicities, sorted.
    pub fn pieces(&self) -> Vec<(Signature, usize)> {
        let mut v: Vec<Signature> = match self {
            Sigma::Connected(s) => alloc::vec![*s],
            Sigma::Multi(v) => v.clone(),
        };
        v.sort();
        let mut out: Vec<(Signature, usize)> = Vec::new();
        for s in v {
            match out.last_mut() {
                Some((t, c)) if *t == s => *c += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() {
        out.push(last);
    }
    out
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Connected(s) => write!(f, "{s}"),
            Sigma::Multi(v) => {
                write!(f, "multi:[")?;
                for (i, s) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// How a disconnected `Σ` is matched against components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CountMode {
    /// Components equal to a connected `Σ`; a disconnected `Σ` counts 0.
    #[default]
    Strict,
    /// Disjoint groups of components realizing the pieces of `Σ`.
    Grouped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum QuotientMode {
    #[default]
    None,
    Antipodal,
}

/// One connected component of a zero set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Component {
    pub signature: Signature,
    /// False when the component reaches the boundary of the grid.
    pub closed: bool,
    /// Indices of the cells the component passes through, sorted.
    pub cells: Vec<usize>,
    /// Vertex positions of the extracted piecewise-linear set, flattened with
    /// stride [`ComponentReport::point_dim`].
    pub points: Vec<f64>,
    /// For quotient reports: whether the component is its own antipode. The
    /// signature of such a component is that of its preimage.
    pub antipodal_invariant: Option<bool>,
}

impl Component {
    /// `max_p |p - center|` over the extracted points.
    pub fn max_distance(&self, center: &[f64]) -> f64 {
        self.points
            .chunks(center.len())
            .map(|p| p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// `max_p ∠(p, center)` for points on a unit sphere.
    pub fn max_angle(&self, center: &[f64]) -> f64 {
        self.points
            .chunks(center.len())
            .map(|p| {
                let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                let c = p.iter().zip(center).map(|(a, b)| a * b).sum::<f64>() / n;
                c.clamp(-1.0, 1.0).acos()
            })
            .fold(0.0, f64::max)
    }
}

/// Components of a zero set extracted on a grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentReport {
    pub components: Vec<Component>,
    /// Dimension of the domain (`n`).
    pub domain_dim: usize,
    /// Length of each stored point.
    pub point_dim: usize,
    /// Planar grid actually used, after any offset.
    pub grid: Option<GridSpec>,
    /// Points per cube edge for cube-sphere grids, or points on the circle.
    pub sphere_resolution: Option<usize>,
    pub quotient: QuotientMode,
    /// Cells where root refinement failed (codimension ≥ 2 only).
    pub unresolved_cells: usize,
}

impl ComponentReport {
    pub fn closed_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.closed)
    }

    pub fn closed_count(&self) -> usize {
        self.closed_components().count()
    }

    /// True when no cell was left unresolved.
    pub fn is_certain(&self) -> bool {
        self.unresolved_cells == 0
    }

    /// The closed components contained in the planar ball `B(center, radius)`.
    pub fn within_ball(&self, center: &[f64], radius: f64) -> ComponentReport {
        self.filtered(|c| c.closed && c.max_distance(center) <= radius)
    }

    /// The closed components within geodesic distance `radius` of `center`.
    pub fn within_cap(&self, center: &[f64], radius: f64) -> ComponentReport {
        self.filtered(|c| c.closed && c.max_angle(center) <= radius)
    }

    pub fn filtered(&self, keep: impl Fn(&Component) -> bool) -> ComponentReport {
        ComponentReport { components: self.components.iter().filter(|c| keep(c)).cloned().collect(), ..self.clone_empty() }
    }

    fn clone_empty(&self) -> ComponentReport {
        ComponentReport {
            components: Vec::new(),
            domain_dim: self.domain_dim,
            point_dim: self.point_dim,
            grid: self.grid.clone(),
            sphere_resolution: self.sphere_resolution,
            quotient: self.quotient,
            unresolved_cells: self.unresolved_cells,
        }
    }
}

/// `N_Σ`: closed components of type `Σ`.
///
/// Strict mode counts components equal to a connected `Σ`. Grouped mode counts
/// disjoint groups realizing all pieces of `Σ`: the minimum over piece types of
/// `floor(available / required)`.
pub fn count_n_sigma(report: &ComponentReport, sigma: &Sigma, mode: CountMode) -> usize {
    let available = |s: &Signature| report.closed_components().filter(|c| c.signature == *s).count();
    match (sigma, mode) {
        (Sigma::Connected(s), _) => available(s),
        (Sigma::Multi(_), CountMode::Strict) => 0,
        (Sigma::Multi(_), CountMode::Grouped) => {
            sigma.pieces().iter().map(|(s, need)| available(s) / need).min().unwrap_or(0)
        }
    }
}

/// Human-readable summary used in logs.
pub fn describe(report: &ComponentReport) -> String {
    let closed = report.closed_count();
    format!("{} components ({} closed)", report.components.len(), closed)
}
