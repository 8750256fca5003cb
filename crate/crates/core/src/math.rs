//! Special functions and small combinatorial helpers.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Lebesgue volume of the unit ball in `R^dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    PI.powf(h) / gamma(h + 1.0)
}

/// Surface measure of the round unit sphere `S^n ⊂ R^{n+1}`.
pub fn sphere_area(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Dimension of the space of spherical harmonics of degree `l` on `S^n`.
pub fn harmonic_dimension(n: usize, l: usize) -> usize {
    let top = binomial(l + n, n);
    if l >= 2 {
        top - binomial(l + n - 2, n)
    } else {
        top
    }
}

/// Fills `out[l]` with the Gegenbauer polynomial of index `l` attached to `S^n`,
/// normalized so that every entry equals 1 at `t = 1`.
///
/// For `n = 1` these are the Chebyshev polynomials, for `n = 2` the Legendre ones.
pub fn normalized_gegenbauer(n: usize, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let lambda = (n as f64 - 1.0) / 2.0;
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = t;
    for l in 1..out.len() - 1 {
        let lf = l as f64;
        out[l + 1] = (2.0 * (lf + lambda) * t * out[l] - lf * out[l - 1]) / (lf + 2.0 * lambda);
    }
}

/// Bessel function of the first kind `J_ν(x)` for half-integer or integer order
/// `ν = twice_order / 2`, `x ≥ 0`.
///
/// Uses Miller's backward recurrence, normalized by `J_0 + 2ΣJ_{2k} = 1` for integer
/// orders and by the elementary `J_{±1/2}` for half-integer orders.
pub fn bessel_j(twice_order: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if twice_order == 0 { 1.0 } else { 0.0 };
    }
    let half = twice_order % 2 == 1;
    let base = if half { 0.5 } else { 0.0 };
    let target = (twice_order / 2) as usize;
    let top_seed = target.max(x as usize) + 20 + (60.0 * (target.max(x as usize) as f64 + 1.0)).sqrt() as usize;
    let top = top_seed + (top_seed % 2);

    // Recurrence J_{μ-1} = (2μ/x) J_μ - J_{μ+1}, run downward from `top`.
    let mut above = 0.0_f64;
    let mut current = 1e-30_f64;
    let mut at_target = if top == target { current } else { 0.0 };
    let mut even_sum = 0.0_f64;
    let mut k = top;
    while k > 0 {
        let mu = base + k as f64;
        let below = 2.0 * mu / x * current - above;
        above = current;
        current = below;
        k -= 1;
        if k == target {
            at_target = current;
        }
        if !half && k % 2 == 0 && k > 0 {
            even_sum += current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            at_target *= 1e-250;
            even_sum *= 1e-250;
        }
    }
    // `current` holds the unnormalized J_base.
    if !half {
        let norm = current + 2.0 * even_sum;
        at_target / norm
    } else {
        let minus_half = 1.0 / x * current - above;
        let pref = (2.0 / (PI * x)).sqrt();
        let (s, c) = (x.sin(), x.cos());
        let scale = if s.abs() >= c.abs() {
            pref * s / current
        } else {
            pref * c / minus_half
        };
        at_target * scale
    }
}
