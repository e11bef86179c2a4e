//! Summaries, normal CDF, Kolmogorov-Smirnov distance, histograms and
//! log-log rate fits.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Probability levels reported by [`summarize`].
pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (divisor `count - 1`); `None` for a single sample.
    pub variance: Option<f64>,
    pub min: f64,
    pub max: f64,
    /// `(level, value)` pairs for [`QUANTILE_LEVELS`].
    pub quantiles: Vec<(f64, f64)>,
}

impl SummaryStats {
    pub fn quantile(&self, level: f64) -> Option<f64> {
        self.quantiles.iter().find(|(l, _)| *l == level).map(|&(_, v)| v)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).unwrap_or(self.mean)
    }
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Quantile of sorted data with the midpoint rule: the `k`-th order
/// statistic (1-based) sits at level `(k - 0.5) / N`, linear in between,
/// clamped to the extremes outside `[0.5/N, 1 - 0.5/N]`.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let n = sorted.len();
    let h = n as f64 * level + 0.5;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= n as f64 {
        return sorted[n - 1];
    }
    let lo = libm::floor(h) as usize;
    let frac = h - lo as f64;
    sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1])
}

/// Median of unsorted data.
pub fn median(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(quantile_sorted(&sorted(samples), 0.5))
}

/// Mean, unbiased variance, extremes and quantiles.
///
/// Welford's update runs over the sorted copy, so the result does not depend
/// on the input order.
pub fn summarize(samples: &[f64]) -> Result<SummaryStats> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s = sorted(samples);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in s.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let count = s.len();
    let variance = (count >= 2).then(|| (m2 / (count - 1) as f64).max(0.0));
    Ok(SummaryStats {
        count,
        mean,
        variance,
        min: s[0],
        max: s[count - 1],
        quantiles: QUANTILE_LEVELS.iter().map(|&l| (l, quantile_sorted(&s, l))).collect(),
    })
}

/// `Φ(x) = erfc(-x / √2) / 2`, via the `libm` port of the FreeBSD `erfc`
/// (rational approximations, error below 1 ulp).
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsResult {
    pub d_statistic: f64,
    pub sample_size: usize,
}

/// One-sample Kolmogorov-Smirnov distance against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s = sorted(samples);
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(KsResult { d_statistic: d.clamp(0.0, 1.0), sample_size: s.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln size, ln value)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<RegressionFit> {
    if points.len() < 2 || points.iter().any(|&(s, v)| !(s > 0.0 && v > 0.0)) {
        return Err(Error::NonPositiveInput);
    }
    let xs: Vec<f64> = points.iter().map(|&(s, _)| libm::log(s)).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| libm::log(v)).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::NonPositiveInput);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // constant data is fit exactly
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(RegressionFit { slope, intercept, r_squared })
}

/// Binned density estimate on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    /// Count per bin divided by `(total * width)`.
    pub densities: Vec<f64>,
    pub counts: Vec<usize>,
    pub total: usize,
    pub out_of_range: usize,
}

impl Histogram {
    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        (self.lo + k as f64 * self.width, self.lo + (k + 1) as f64 * self.width)
    }

    /// `Σ density · width`, the in-range fraction.
    pub fn mass(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.width
    }
}

/// Bins are half-open `[lo + k w, lo + (k+1) w)` except the last, which
/// also takes `hi`.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BadRange);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut out_of_range = 0;
    for &x in samples {
        if !(x >= lo && x <= hi) {
            out_of_range += 1;
            continue;
        }
        let k = (libm::floor((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total = samples.len();
    let scale = if total == 0 { 0.0 } else { 1.0 / (total as f64 * width) };
    Ok(Histogram {
        lo,
        hi,
        width,
        densities: counts.iter().map(|&c| c as f64 * scale).collect(),
        counts,
        total,
        out_of_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarize_constant() {
        let s = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.variance, Some(0.0));
    }

    #[test]
    fn summarize_one_to_four() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.variance.unwrap() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.median(), 2.5);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        // midpoint rule: level 0.25 -> h = 1.5
        assert_eq!(s.quantile(0.25), Some(1.5));
        assert_eq!(s.quantile(0.05), Some(1.0));
        assert_eq!(s.quantile(0.95), Some(4.0));
    }

    #[test]
    fn summarize_single_and_empty() {
        let s = summarize(&[3.0]).unwrap();
        assert_eq!(s.variance, None);
        assert_eq!(s.median(), 3.0);
        assert_eq!(summarize(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(standard_normal_cdf(0.0), 0.5);
        // Φ(1) = 0.5 + ∫_0^1 φ, by quadrature
        let phi = |t: f64| libm::exp(-0.5 * t * t) / libm::sqrt(2.0 * core::f64::consts::PI);
        let oracle = 0.5 + crate::quad::adaptive_simpson(phi, 0.0, 1.0, 1e-15);
        assert!((standard_normal_cdf(1.0) - oracle).abs() < 1e-12);
        assert!((standard_normal_cdf(1.0) - 0.841_344_746_1).abs() < 1e-10);
        for &x in &[0.5, 1.0, 2.0, 5.0] {
            assert!((standard_normal_cdf(x) + standard_normal_cdf(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normal_cdf_against_quadrature_grid() {
        let phi = |t: f64| libm::exp(-0.5 * t * t) / libm::sqrt(2.0 * core::f64::consts::PI);
        for i in -16..=16 {
            let x = i as f64 * 0.375;
            let oracle = 0.5 + crate::quad::adaptive_simpson(phi, 0.0, x, 1e-15);
            assert!((standard_normal_cdf(x) - oracle).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn ks_single_point_at_median() {
        let r = ks_statistic(&[0.0], standard_normal_cdf).unwrap();
        assert_eq!(r.d_statistic, 0.5);
        assert_eq!(r.sample_size, 1);
    }

    #[test]
    fn ks_midpoint_placement() {
        // uniform law: F^{-1}(u) = u
        let xs: Vec<f64> = (1..=10).map(|i| (i as f64 - 0.5) / 10.0).collect();
        let r = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((r.d_statistic - 0.05).abs() < 1e-15);
    }

    #[test]
    fn ks_separated_samples() {
        let r = ks_statistic(&[-3.0, -2.5, -2.0], |x| x.clamp(0.0, 1.0)).unwrap();
        assert_eq!(r.d_statistic, 1.0);
        assert_eq!(ks_statistic(&[], standard_normal_cdf), Err(Error::EmptyInput));
    }

    #[test]
    fn loglog_exact_power_laws() {
        let f = loglog_slope(&[(2.0, 1.0), (4.0, 0.5), (8.0, 0.25)]).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);

        let f = loglog_slope(&[(2.0, 1.0), (4.0, 1.0), (8.0, 1.0)]).unwrap();
        assert_eq!(f.slope, 0.0);

        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0].iter().map(|&p| (p, 3.0 * libm::pow(p, -0.5))).collect();
        let f = loglog_slope(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn loglog_rejects_bad_points() {
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), Err(Error::NonPositiveInput));
        assert_eq!(loglog_slope(&[(1.0, 1.0), (2.0, 0.0)]), Err(Error::NonPositiveInput));
        assert_eq!(loglog_slope(&[(2.0, 1.0), (2.0, 3.0)]), Err(Error::NonPositiveInput));
    }

    #[test]
    fn histogram_point_mass() {
        let h = histogram(&[1.0; 100], 0.0, 2.0, 2).unwrap();
        assert_eq!(h.densities, vec![0.0, 1.0]);
        assert_eq!(h.width, 1.0);
    }

    #[test]
    fn histogram_uniform_grid() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let h = histogram(&xs, 0.0, 1.0, 10).unwrap();
        for d in &h.densities {
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_out_of_range() {
        let h = histogram(&[3.0], 0.0, 2.0, 4).unwrap();
        assert_eq!(h.out_of_range, 1);
        assert_eq!(h.densities.iter().sum::<f64>(), 0.0);
        assert_eq!(histogram(&[1.0], 2.0, 2.0, 4), Err(Error::BadRange));
        assert_eq!(histogram(&[1.0], 0.0, 2.0, 0), Err(Error::BadRange));
    }

    #[test]
    fn median_helper() {
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[]), Err(Error::EmptyInput));
    }
}
