//! Maximal packings of `S^n` (`n ∈ {1, 2}`) by disjoint geodesic balls of a
//! given radius whose doubles cover the sphere.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use hashbrown::HashMap;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::rng::uniform_on_sphere;
use crate::topology::CubeSphere;

/// Frozen packing constant `c'`: every packing returned by [`pack_balls`] on
/// `S^2` with radius in `[3/64, 3/4]` has at least `c' radius^{-2}` balls.
pub const PACKING_CONSTANT: f64 = 2.2;

/// Centers of disjoint balls of geodesic radius `radius` on `S^n`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PackingResult {
    pub dim: usize,
    pub radius: f64,
    /// Unit vectors of `R^{n+1}`.
    pub centers: Vec<Vec<f64>>,
}

impl PackingResult {
    pub fn count(&self) -> usize {
        self.centers.len()
    }

    /// Smallest pairwise geodesic distance (infinite for fewer than two centers).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                best = best.min(angle(&self.centers[i], &self.centers[j]));
            }
        }
        best
    }

    /// Geodesic distance from `p` to the nearest center.
    pub fn distance_to_centers(&self, p: &[f64]) -> f64 {
        self.centers.iter().map(|c| angle(c, p)).fold(f64::INFINITY, f64::min)
    }

    /// Largest distance from `probes` uniform points to the nearest center.
    pub fn coverage_probe<R: Rng + ?Sized>(&self, probes: usize, rng: &mut R) -> f64 {
        let mut p = vec![0.0; self.dim + 1];
        let mut worst = 0.0_f64;
        for _ in 0..probes {
            uniform_on_sphere(rng, &mut p);
            worst = worst.max(self.distance_to_centers(&p));
        }
        worst
    }
}

/// Geodesic distance between unit vectors, accurate at small angles.
fn angle(a: &[f64], b: &[f64]) -> f64 {
    let chord = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    2.0 * (0.5 * chord).min(1.0).asin()
}

/// Greedy maximal packing: candidates from a fine lattice in a fixed order,
/// then corners of the union of doubled balls until none is uncovered.
///
/// Centers are pairwise at least `2 radius` apart and every point of the sphere
/// lies within `2 radius` of a center.
pub fn pack_balls(n: usize, radius: f64) -> Result<PackingResult> {
    if !(radius > 0.0 && radius < PI / 4.0) {
        return Err(invalid("packing radius must lie in (0, π/4)"));
    }
    match n {
        1 => Ok(pack_circle(radius)),
        2 => pack_sphere(radius),
        _ => Err(invalid("packings are available on S^1 and S^2")),
    }
}

fn pack_circle(radius: f64) -> PackingResult {
    let count = (PI / radius).floor() as usize;
    let centers = (0..count)
        .map(|k| {
            let (s, c) = (2.0 * radius * k as f64).sin_cos();
            vec![c, s]
        })
        .collect();
    PackingResult { dim: 1, radius, centers }
}

/// Spatial hash over `R^3` with cubic buckets.
struct Buckets {
    size: f64,
    map: HashMap<[i32; 3], Vec<usize>>,
}

impl Buckets {
    fn key(&self, p: &[f64; 3]) -> [i32; 3] {
        p.map(|v| (v / self.size).floor() as i32)
    }

    fn insert(&mut self, p: &[f64; 3], id: usize) {
        let k = self.key(p);
        self.map.entry(k).or_default().push(id);
    }

    fn near<'a>(&'a self, p: &[f64; 3]) -> impl Iterator<Item = usize> + 'a {
        let k = self.key(p);
        (0..27).flat_map(move |o| {
            let d = [o % 3, (o / 3) % 3, o / 9].map(|v| v as i32 - 1);
            self.map.get(&[k[0] + d[0], k[1] + d[1], k[2] + d[2]]).into_iter().flatten().copied()
        })
    }
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p.map(|v| v / n)
}

fn pack_sphere(radius: f64) -> Result<PackingResult> {
    let sep = 2.0 * radius;
    let k = ((PI / 2.0) / (radius / 4.0)).ceil() as usize + 1;
    let lattice = CubeSphere::new(k)?;
    // Chord of the search radius 4r bounds every interaction below.
    let mut buckets = Buckets { size: 2.0 * (2.0 * radius).sin(), map: HashMap::new() };
    let mut centers: Vec<[f64; 3]> = Vec::new();
    let admissible = |p: &[f64; 3], centers: &[[f64; 3]], buckets: &Buckets| buckets.near(p).all(|j| angle(p, &centers[j]) >= sep);
    for i in 0..lattice.vertex_count() {
        let p = lattice.position(i);
        if admissible(&p, &centers, &buckets) {
            buckets.insert(&p, centers.len());
            centers.push(p);
        }
    }

    // Any uncovered region has a corner where two doubled balls meet outside
    // all others; that corner, nudged outward, is itself admissible.
    let cos_sep = sep.cos();
    let nudge = 1e-9;
    loop {
        let mut added = false;
        let mut a = 0;
        while a < centers.len() {
            let pa = centers[a];
            let neighbours: Vec<usize> = buckets.near(&pa).filter(|&b| b > a).collect();
            for b in neighbours {
                let pb = centers[b];
                let theta = angle(&pa, &pb);
                if theta >= 2.0 * sep {
                    continue;
                }
                let u = normalize([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]);
                let w = normalize([
                    pa[1] * pb[2] - pa[2] * pb[1],
                    pa[2] * pb[0] - pa[0] * pb[2],
                    pa[0] * pb[1] - pa[1] * pb[0],
                ]);
                let s = cos_sep / (0.5 * theta).cos();
                let t = (1.0 - s * s).max(0.0).sqrt();
                for sign in [1.0, -1.0] {
                    let tt = sign * (t + nudge);
                    let p = normalize([0, 1, 2].map(|i| s * u[i] + tt * w[i]));
                    if admissible(&p, &centers, &buckets) {
                        buckets.insert(&p, centers.len());
                        centers.push(p);
                        added = true;
                    }
                }
            }
            a += 1;
        }
        if !added {
            break;
        }
    }
    Ok(PackingResult { dim: 2, radius, centers: centers.into_iter().map(|p| p.to_vec()).collect() })
}
