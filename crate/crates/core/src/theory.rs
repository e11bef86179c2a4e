//! Closed forms: the normal law of the largest eigenvalue for `mu > 0`, the
//! expectation and variance of the one-step estimator, and the
//! Marchenko-Pastur law.
//!
//! All formulas use the finite-size aspect ratio `c = p / n`.

use core::f64::consts::PI;

use crate::quad::adaptive_simpson;

/// Closed-form targets for one `(p, n, mu, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoryParams {
    pub p: usize,
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    /// `p / n`.
    pub c: f64,
    /// `p mu^2 + sigma^2`, the top eigenvalue of `E W`.
    pub l: f64,
    /// `p mu^2 + (1 + c) sigma^2`.
    pub clt_mean: f64,
    /// `4 c mu^2 sigma^2`.
    pub clt_var: f64,
    /// `p sigma^2 / n`.
    pub correction: f64,
    /// Lower Marchenko-Pastur edge `sigma^2 (1 - sqrt c)^2`.
    pub a: f64,
    /// Upper Marchenko-Pastur edge `sigma^2 (1 + sqrt c)^2`.
    pub b: f64,
}

/// # Panics
/// If `p` or `n` is zero.
pub fn clt_params(p: usize, n: usize, mu: f64, sigma: f64) -> TheoryParams {
    assert!(p > 0 && n > 0, "p and n must be positive");
    let c = p as f64 / n as f64;
    let s2 = sigma * sigma;
    let (a, b) = mp_edges(c, sigma);
    TheoryParams {
        p,
        n,
        mu,
        sigma,
        c,
        l: estimator_expectation(p, mu, sigma),
        clt_mean: p as f64 * mu * mu + (1.0 + c) * s2,
        clt_var: 4.0 * c * mu * mu * s2,
        correction: p as f64 * s2 / n as f64,
        a,
        b,
    }
}

/// `E[est1] = p mu^2 + sigma^2`.
pub fn estimator_expectation(p: usize, mu: f64, sigma: f64) -> f64 {
    p as f64 * mu * mu + sigma * sigma
}

/// Leading term `4 mu^2 sigma^2 p / n` of `Var[est1]`.
pub fn estimator_variance(p: usize, n: usize, mu: f64, sigma: f64) -> f64 {
    4.0 * mu * mu * sigma * sigma * p as f64 / n as f64
}

/// `(a, b)` support edges of the Marchenko-Pastur law.
pub fn mp_edges(c: f64, sigma: f64) -> (f64, f64) {
    let s2 = sigma * sigma;
    let rc = libm::sqrt(c);
    (s2 * (1.0 - rc) * (1.0 - rc), s2 * (1.0 + rc) * (1.0 + rc))
}

/// Absolutely continuous part of the Marchenko-Pastur density. Zero outside
/// `[a, b]` and at `x = 0`.
pub fn mp_density(x: f64, c: f64, sigma: f64) -> f64 {
    let (a, b) = mp_edges(c, sigma);
    if !(x >= a && x <= b) || x <= 0.0 {
        return 0.0;
    }
    let prod = (b - x) * (x - a);
    if prod <= 0.0 {
        return 0.0;
    }
    libm::sqrt(prod) / (2.0 * PI * x * c * sigma * sigma)
}

/// Atom `1 - 1/c` at zero when `c > 1`.
pub fn mp_point_mass(c: f64) -> f64 {
    if c > 1.0 {
        1.0 - 1.0 / c
    } else {
        0.0
    }
}

/// `k`-th moment of the standard (`c = 1`, `sigma = 1`) law: the Catalan
/// number `C(2k, k) / (k + 1)`.
pub fn mp_moment(k: u32) -> f64 {
    // C_{j+1} = C_j * 2 (2j + 1) / (j + 2), exact in u128 for j < 64
    let mut cat: u128 = 1;
    let mut approx = 1.0f64;
    for j in 0..k as u128 {
        if j < 64 {
            cat = cat * 2 * (2 * j + 1) / (j + 2);
            approx = cat as f64;
        } else {
            approx *= (2.0 * (2 * j + 1) as f64) / (j + 2) as f64;
        }
    }
    approx
}

/// `∫ g(x) f_MP(x) dx` over `[lo, hi] ∩ [a, b]` (continuous part only).
///
/// Integrates in `θ ∈ [0, π]` with `x = a + (b - a) sin²(θ/2)`, which absorbs
/// both square-root edges; at `a = 0` the `1/x` factor cancels analytically.
pub fn mp_integral<G: Fn(f64) -> f64>(g: G, c: f64, sigma: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let (a, b) = mp_edges(c, sigma);
    let lo = lo.max(a);
    let hi = hi.min(b);
    if !(hi > lo) {
        return 0.0;
    }
    let h = 0.5 * (b - a);
    let norm = 1.0 / (2.0 * PI * c * sigma * sigma);
    let angle = |x: f64| 2.0 * libm::asin(libm::sqrt(((x - a) / (2.0 * h)).clamp(0.0, 1.0)));
    let integrand = |theta: f64| {
        let s = libm::sin(0.5 * theta);
        let co = libm::cos(0.5 * theta);
        let x = a + 2.0 * h * s * s;
        let weight = if a > 0.0 {
            4.0 * h * h * s * s * co * co / x
        } else {
            2.0 * h * co * co
        };
        g(x) * weight * norm
    };
    adaptive_simpson(integrand, angle(lo), angle(hi), tol)
}
