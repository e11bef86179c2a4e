//! Monte Carlo drivers. Each returns a report with one [`Check`] per claim.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use rmlab_core::linalg::{self, DEFAULT_SIZE_LIMIT};
use rmlab_core::replication::{
    self, centered_top_eigenvalue, run_estimator_replication, run_replication_detailed, run_replication_with,
    SolverOptions,
};
use rmlab_core::stats::{self, Histogram, KsResult, RegressionFit, SummaryStats};
use rmlab_core::theory::{self, TheoryParams};
use rmlab_core::{MatrixParams, SpectralSample};
use serde::Serialize;

use crate::error::{Error, Result};

/// `(key, default, meaning)` for every tolerance settable with `--tol-KEY`.
pub const TOLERANCE_KEYS: &[(&str, f64, &str)] = &[
    ("clt-mean", 0.3, "max |mean(lambda1) - clt_mean|"),
    ("clt-var-lo", 0.85, "min sample_var / clt_var"),
    ("clt-var-hi", 1.15, "max sample_var / clt_var"),
    ("ks", 0.05, "max KS distance of standardized lambda1"),
    ("slope-est2", 0.35, "half-width of the est2 slope band around -1"),
    ("slope-est1", 0.3, "half-width of the corrected est1 slope band around -1/2"),
    ("edge-slack", 0.15, "slack above the upper bulk edge b for lambda2"),
    ("edge-rate", 0.99, "min fraction of replications with lambda2 <= b + slack"),
    ("centered-edge", 0.2, "max |lambda1(centered) - b|"),
    ("centered-rate", 0.95, "min fraction of replications within centered-edge"),
    ("moment-lo", 0.8, "min moment ratio"),
    ("moment-hi", 1.2, "max moment ratio"),
    ("ones-identity", 1e-8, "max relative residual of the all-ones decomposition identity"),
    ("chain", 1e-9, "relative slack of est1 <= est2 <= lambda1 and eigenvalue ordering"),
    ("gram", 1e-8, "max relative gap between the two Gram sides"),
    ("bulk-moment", 0.03, "max relative error of the mean bulk eigenvalue"),
    ("bulk-gap", 0.05, "max interior-bin gap between histogram and density"),
    ("catalan", 1e-6, "max error of quadrature moments vs Catalan numbers"),
];

/// Check thresholds; unset keys use the [`TOLERANCE_KEYS`] defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tolerances {
    overrides: BTreeMap<&'static str, f64>,
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        let (name, default, _) = TOLERANCE_KEYS
            .iter()
            .find(|(k, _, _)| *k == key)
            .unwrap_or_else(|| panic!("unknown tolerance key {key}"));
        self.overrides.get(name).copied().unwrap_or(*default)
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let Some((name, _, _)) = TOLERANCE_KEYS.iter().find(|(k, _, _)| *k == key) else {
            return Err(Error::Usage(format!("unknown flag --tol-{key}")));
        };
        if !value.is_finite() {
            return Err(Error::Usage(format!("--tol-{key} must be finite")));
        }
        self.overrides.insert(name, value);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: Option<f64>,
    /// Human-readable acceptance region, e.g. `<= 0.05`.
    pub bound: String,
    pub verdict: Verdict,
}

impl Check {
    fn from_bool(name: &'static str, value: f64, bound: String, ok: bool) -> Check {
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        Check { name, value: Some(value), bound, verdict }
    }

    pub fn at_most(name: &'static str, value: f64, limit: f64) -> Check {
        Check::from_bool(name, value, format!("<= {limit}"), value <= limit)
    }

    pub fn below(name: &'static str, value: f64, limit: f64) -> Check {
        Check::from_bool(name, value, format!("< {limit}"), value < limit)
    }

    pub fn at_least(name: &'static str, value: f64, limit: f64) -> Check {
        Check::from_bool(name, value, format!(">= {limit}"), value >= limit)
    }

    pub fn within(name: &'static str, value: f64, lo: f64, hi: f64) -> Check {
        Check::from_bool(name, value, format!("in [{lo}, {hi}]"), value >= lo && value <= hi)
    }

    pub fn not_applicable(name: &'static str, reason: &str) -> Check {
        Check { name, value: None, bound: reason.to_string(), verdict: Verdict::NotApplicable }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// True when no check failed.
pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(Check::passed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: MatrixParams,
    pub replications: u64,
    /// Worker threads; `0` picks one per core.
    pub parallelism: usize,
    /// `(p, n)` sizes for scaling runs.
    pub size_grid: Option<Vec<(usize, usize)>>,
    pub tolerances: Tolerances,
    pub output_path: Option<PathBuf>,
    pub bins: usize,
    /// Histogram range; `None` means `[a - 0.1, b + 0.1]`.
    pub range: Option<(f64, f64)>,
    pub solver: SolverOptions,
}

impl ExperimentConfig {
    pub fn new(params: MatrixParams, replications: u64) -> Self {
        ExperimentConfig {
            params,
            replications,
            parallelism: 0,
            size_grid: None,
            tolerances: Tolerances::default(),
            output_path: None,
            bins: 40,
            range: None,
            solver: SolverOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| Error::Usage(e.to_string()))?;
        if self.replications == 0 {
            return Err(Error::Usage("--reps must be at least 1".into()));
        }
        if let Some(grid) = &self.size_grid {
            if grid.iter().any(|&(p, n)| p == 0 || n == 0) {
                return Err(Error::Usage("--grid sizes must be positive".into()));
            }
        }
        if self.bins == 0 {
            return Err(Error::Usage("--bins must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.range {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Usage("--range needs finite lo < hi".into()));
            }
        }
        Ok(())
    }

    fn theory(&self) -> TheoryParams {
        let p = &self.params;
        theory::clt_params(p.p, p.n, p.mu, p.sigma)
    }
}

/// Runs `f(0..count)` on `parallelism` workers and returns results in index
/// order. On failure the lowest failing index wins.
pub fn replicate<T, F>(parallelism: usize, count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> rmlab_core::Result<T> + Sync + Send,
{
    let results: Vec<rmlab_core::Result<T>> = if parallelism == 1 {
        (0..count).map(&f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        pool.install(|| (0..count).into_par_iter().map(&f).collect())
    };
    results.into_iter().map(|r| r.map_err(Error::from)).collect()
}

/// All replications of `config.params`.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<SpectralSample>> {
    config.validate()?;
    let params = config.params;
    let solver = config.solver;
    replicate(config.parallelism, config.replications, |i| run_replication_with(&params, i, solver))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub replications: u64,
    pub summary: SummaryStats,
    pub theoretical: TheoryParams,
    /// Distance of `(lambda1 - clt_mean) / sqrt(clt_var)` from the normal law.
    pub standardized_ks: Option<KsResult>,
    pub mean_error: f64,
    pub variance_ratio: Option<f64>,
    pub checks: Vec<Check>,
}

impl CltReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

pub fn clt_report(config: &ExperimentConfig, samples: &[SpectralSample]) -> Result<CltReport> {
    let tol = &config.tolerances;
    let t = config.theory();
    let lambdas: Vec<f64> = samples.iter().map(|s| s.lambda1).collect();
    let summary = stats::summarize(&lambdas)?;
    let mean_error = (summary.mean - t.clt_mean).abs();
    let mut checks = vec![Check::at_most("mean_error", mean_error, tol.get("clt-mean"))];

    let degenerate = !(t.clt_var > 0.0);
    let variance_ratio = match summary.variance {
        Some(v) if !degenerate => Some(v / t.clt_var),
        _ => None,
    };
    checks.push(match (variance_ratio, summary.variance) {
        (Some(r), _) => Check::within("variance_ratio", r, tol.get("clt-var-lo"), tol.get("clt-var-hi")),
        (None, None) => Check::not_applicable("variance_ratio", "single replication"),
        (None, Some(_)) => Check::not_applicable("variance_ratio", "degenerate law"),
    });

    let standardized_ks = if degenerate {
        None
    } else {
        let sd = t.clt_var.sqrt();
        let z: Vec<f64> = lambdas.iter().map(|l| (l - t.clt_mean) / sd).collect();
        Some(stats::ks_statistic(&z, stats::standard_normal_cdf)?)
    };
    checks.push(match &standardized_ks {
        Some(ks) => Check::at_most("ks_distance", ks.d_statistic, tol.get("ks")),
        None => Check::not_applicable("ks_distance", "degenerate law"),
    });

    Ok(CltReport {
        replications: samples.len() as u64,
        summary,
        theoretical: t,
        standardized_ks,
        mean_error,
        variance_ratio,
        checks,
    })
}

/// Compares the spread of `lambda1` with its normal limit.
pub fn verify_clt(config: &ExperimentConfig) -> Result<(CltReport, Vec<SpectralSample>)> {
    let samples = simulate(config)?;
    Ok((clt_report(config, &samples)?, samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub p: usize,
    pub n: usize,
    /// Median of `|est2 - lambda1|`.
    pub median_abs_err_est2: f64,
    /// Median of `|est1 - lambda1 + p sigma^2 / n|`.
    pub median_abs_err_est1_corrected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub replications: u64,
    pub grid: Vec<ScalingRow>,
    pub fit_est2: RegressionFit,
    pub fit_est1: RegressionFit,
    pub checks: Vec<Check>,
}

impl ScalingReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Log-log fits of both error medians against `p`.
pub fn scaling_report(rows: Vec<ScalingRow>, replications: u64, tol: &Tolerances) -> Result<ScalingReport> {
    let fit = |f: fn(&ScalingRow) -> f64| {
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.p as f64, f(r))).collect();
        stats::loglog_slope(&points)
    };
    let fit_est2 = fit(|r| r.median_abs_err_est2)?;
    let fit_est1 = fit(|r| r.median_abs_err_est1_corrected)?;
    let (b2, b1) = (tol.get("slope-est2"), tol.get("slope-est1"));
    let checks = vec![
        Check::within("slope_est2", fit_est2.slope, -1.0 - b2, -1.0 + b2),
        Check::within("slope_est1_corrected", fit_est1.slope, -0.5 - b1, -0.5 + b1),
    ];
    Ok(ScalingReport { replications, grid: rows, fit_est2, fit_est1, checks })
}

fn validate_grid(grid: &[(usize, usize)]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::Usage("--grid needs at least 3 sizes".into()));
    }
    let (p0, n0) = grid[0];
    for w in grid.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Usage("--grid sizes must be strictly increasing in p".into()));
        }
    }
    if grid.iter().any(|&(p, n)| p * n0 != p0 * n) {
        return Err(Error::Usage("--grid sizes must share one ratio p/n".into()));
    }
    Ok(())
}

/// Estimator error rates over `config.size_grid` at fixed `p / n`.
pub fn error_scaling(config: &ExperimentConfig) -> Result<ScalingReport> {
    config.validate()?;
    let grid = config.size_grid.as_deref().ok_or_else(|| Error::Usage("error scaling needs --grid".into()))?;
    validate_grid(grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &(p, n) in grid {
        let params = config.params.with_size(p, n);
        let solver = config.solver;
        let reps = replicate(config.parallelism, config.replications, |i| {
            run_estimator_replication(&params, i, solver)
        })?;
        let correction = p as f64 * params.sigma * params.sigma / n as f64;
        let err2: Vec<f64> = reps.iter().map(|r| (r.est2 - r.lambda1).abs()).collect();
        let err1: Vec<f64> = reps.iter().map(|r| (r.est1 - r.lambda1 + correction).abs()).collect();
        rows.push(ScalingRow {
            p,
            n,
            median_abs_err_est2: stats::median(&err2)?,
            median_abs_err_est1_corrected: stats::median(&err1)?,
        });
    }
    scaling_report(rows, config.replications, &config.tolerances)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BulkReport {
    pub replications: u64,
    /// `lambda1` is dropped from each spectrum when `mu > 0`.
    pub excludes_top: bool,
    pub pooled_count: usize,
    pub a: f64,
    pub b: f64,
    pub histogram: Option<Histogram>,
    /// Bin averages of the limiting density, aligned with `histogram`.
    pub reference: Vec<f64>,
    pub interior_bins: usize,
    pub sup_gap: Option<f64>,
    pub spectral_moment: Option<f64>,
    pub edge_exceedance_rate: Option<f64>,
    pub catalan_max_error: f64,
    pub checks: Vec<Check>,
}

impl BulkReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Largest error of quadrature moments against the Catalan numbers, `k <= 6`.
pub fn catalan_max_error() -> f64 {
    (0..=6u32)
        .map(|k| {
            let q = theory::mp_integral(|x| x.powi(k as i32), 1.0, 1.0, 0.0, 4.0, 1e-13);
            (q - theory::mp_moment(k)).abs()
        })
        .fold(0.0, f64::max)
}

/// Pooled eigenvalues against the limiting bulk law.
pub fn bulk_check(config: &ExperimentConfig) -> Result<BulkReport> {
    config.validate()?;
    let params = config.params;
    if params.p > DEFAULT_SIZE_LIMIT {
        return Err(rmlab_core::Error::SizeExceeded { dim: params.p, limit: DEFAULT_SIZE_LIMIT }.into());
    }
    let tol = &config.tolerances;
    let t = config.theory();
    let excludes_top = params.mu > 0.0;
    let spectra = replicate(config.parallelism, config.replications, |i| {
        let x = replication::replication_matrix(&params, i)?;
        linalg::full_spectrum(&linalg::covariance(&x), DEFAULT_SIZE_LIMIT)
    })?;

    let skip = usize::from(excludes_top);
    let pooled: Vec<f64> = spectra.iter().flat_map(|s| s[skip..].iter().copied()).collect();
    let mut checks = Vec::new();

    let (lo, hi) = config.range.unwrap_or((t.a - 0.1, t.b + 0.1));
    let (mut histogram, mut reference, mut interior_bins, mut sup_gap, mut spectral_moment) = (None, vec![], 0, None, None);
    if params.p < 2 || pooled.is_empty() {
        checks.push(Check::not_applicable("spectral_moment", "single eigenvalue"));
        checks.push(Check::not_applicable("histogram_sup_gap", "single eigenvalue"));
    } else {
        let s2 = params.sigma * params.sigma;
        let moment = pooled.iter().sum::<f64>() / pooled.len() as f64;
        spectral_moment = Some(moment);
        checks.push(Check::at_most(
            "spectral_moment_error",
            (moment - s2).abs(),
            tol.get("bulk-moment") * s2,
        ));

        let h = stats::histogram(&pooled, lo, hi, config.bins)?;
        let eps = 1e-9 * (t.b - t.a).max(f64::MIN_POSITIVE);
        let mut gap = 0.0f64;
        for k in 0..h.densities.len() {
            let (e0, e1) = h.bin_edges(k);
            let mass = theory::mp_integral(|_| 1.0, t.c, params.sigma, e0, e1, 1e-12);
            reference.push(mass / h.width);
            // bins touching an edge carry the square-root cusp; compare only strictly inside
            if e0 > t.a + eps && e1 < t.b - eps {
                interior_bins += 1;
                gap = gap.max((h.densities[k] - mass / h.width).abs());
            }
        }
        if interior_bins > 0 {
            sup_gap = Some(gap);
            checks.push(Check::at_most("histogram_sup_gap", gap, tol.get("bulk-gap")));
        } else {
            checks.push(Check::not_applicable("histogram_sup_gap", "no bins inside the support"));
        }
        histogram = Some(h);
    }

    let edge_exceedance_rate = if excludes_top && params.p >= 2 {
        let limit = t.b + tol.get("edge-slack");
        let over = spectra.iter().filter(|s| s[1] > limit).count();
        let rate = over as f64 / spectra.len() as f64;
        checks.push(Check::at_least("lambda2_edge_rate", 1.0 - rate, tol.get("edge-rate")));
        Some(rate)
    } else {
        None
    };

    let catalan = catalan_max_error();
    checks.push(Check::at_most("catalan_moments", catalan, tol.get("catalan")));

    Ok(BulkReport {
        replications: config.replications,
        excludes_top,
        pooled_count: pooled.len(),
        a: t.a,
        b: t.b,
        histogram,
        reference,
        interior_bins,
        sup_gap,
        spectral_moment,
        edge_exceedance_rate,
        catalan_max_error: catalan,
        checks,
    })
}

/// Per-replication outcome of the exact identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub sample: SpectralSample,
    pub ones_residual: f64,
    pub chain_ok: bool,
    /// `|lambda1(X X^T / n) - lambda1(X^T X / n)| / lambda1`.
    pub gram_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub replications: u64,
    pub ones_max_residual: f64,
    pub chain_violations: u64,
    pub gram_max_gap: f64,
    /// Replications with `lambda2 > lambda1(centered)`.
    pub lower_ordering_violations: u64,
    /// Replications with `lambda1(centered) > lambda1`.
    pub upper_ordering_violations: u64,
    /// `mean sum_i (W_i - l)^2 / (mu^2 sigma^2 p^3 / n)`.
    pub moment_ratio: Option<f64>,
    /// Fraction of replications with `lambda2 > b + slack`.
    pub edge_exceedance_rate: f64,
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Mean `sum_i (W_i - l)^2` over its leading term; `None` if `mu sigma = 0`.
pub fn moment_ratio(params: &MatrixParams, samples: &[SpectralSample]) -> Option<f64> {
    let (p, n) = (params.p as f64, params.n as f64);
    let lead = params.mu * params.mu * params.sigma * params.sigma * p * p * p / n;
    if !(lead > 0.0) || samples.is_empty() {
        return None;
    }
    let mean = samples.iter().map(|s| s.sum_sq_dev).sum::<f64>() / samples.len() as f64;
    Some(mean / lead)
}

fn identity_record(params: &MatrixParams, index: u64, solver: SolverOptions, chain_tol: f64) -> rmlab_core::Result<IdentityRecord> {
    let rep = run_replication_detailed(params, index, solver)?;
    let s = rep.sample;
    let w = linalg::covariance(&rep.x);
    let l = theory::estimator_expectation(params.p, params.mu, params.sigma);
    let ones_residual = linalg::decompose_ones(&w, &rep.pair, l).identity_residual;
    let slack = chain_tol * s.lambda1.abs();
    let chain_ok = s.est1 <= s.est2 + slack && s.est2 <= s.lambda1 + slack;
    // the replication solved on the smaller side; the other side is independent
    let other_side = if rep.x.cols() >= rep.x.rows() { linalg::dual_gram(&rep.x) } else { w };
    let other = linalg::dominant_eigenvalue(&other_side, solver.tol, solver.max_iter)
        .map_err(|e| e.in_replication(index))?;
    let gram_gap = if s.lambda1 > 0.0 { (s.lambda1 - other).abs() / s.lambda1 } else { other.abs() };
    Ok(IdentityRecord { sample: s, ones_residual, chain_ok, gram_gap })
}

pub fn identity_report(config: &ExperimentConfig, records: &[IdentityRecord]) -> IdentityReport {
    let tol = &config.tolerances;
    let params = &config.params;
    let t = config.theory();
    let chain_tol = tol.get("chain");
    let ones_max_residual = records.iter().map(|r| r.ones_residual).fold(0.0, f64::max);
    let gram_max_gap = records.iter().map(|r| r.gram_gap).fold(0.0, f64::max);
    let chain_violations = records.iter().filter(|r| !r.chain_ok).count() as u64;
    let lower = records
        .iter()
        .filter(|r| r.sample.lambda2 > r.sample.lambda1_centered + chain_tol * r.sample.lambda1)
        .count() as u64;
    let upper = records
        .iter()
        .filter(|r| r.sample.lambda1_centered > r.sample.lambda1 + chain_tol * r.sample.lambda1)
        .count() as u64;
    let samples: Vec<SpectralSample> = records.iter().map(|r| r.sample).collect();
    let moment_ratio = moment_ratio(params, &samples);
    let limit = t.b + tol.get("edge-slack");
    let over = records.iter().filter(|r| r.sample.lambda2 > limit).count();
    let edge_exceedance_rate = if records.is_empty() { 0.0 } else { over as f64 / records.len() as f64 };

    let mut checks = vec![
        Check::below("ones_max_residual", ones_max_residual, tol.get("ones-identity")),
        Check::at_most("chain_violations", chain_violations as f64, 0.0),
        Check::below("gram_max_gap", gram_max_gap, tol.get("gram")),
        Check::at_most("lower_ordering_violations", lower as f64, 0.0),
    ];
    if params.mu > 0.0 {
        checks.push(Check::at_most("upper_ordering_violations", upper as f64, 0.0));
    } else {
        checks.push(Check::not_applicable("upper_ordering_violations", "mu = 0"));
    }
    checks.push(match moment_ratio {
        Some(r) => Check::within("moment_ratio", r, tol.get("moment-lo"), tol.get("moment-hi")),
        None => Check::not_applicable("moment_ratio", "mu sigma = 0"),
    });
    checks.push(Check::at_least("lambda2_edge_rate", 1.0 - edge_exceedance_rate, tol.get("edge-rate")));

    IdentityReport {
        replications: records.len() as u64,
        ones_max_residual,
        chain_violations,
        gram_max_gap,
        lower_ordering_violations: lower,
        upper_ordering_violations: upper,
        moment_ratio,
        edge_exceedance_rate,
        checks,
    }
}

/// Exact identities per replication plus the aggregated moment and edge rates.
pub fn identity_checks(config: &ExperimentConfig) -> Result<(IdentityReport, Vec<IdentityRecord>)> {
    config.validate()?;
    let params = config.params;
    let solver = config.solver;
    let chain_tol = config.tolerances.get("chain");
    let records = replicate(config.parallelism, config.replications, |i| {
        identity_record(&params, i, solver, chain_tol)
    })?;
    Ok((identity_report(config, &records), records))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeReport {
    pub replications: u64,
    /// Upper bulk edge `b`.
    pub target: f64,
    pub summary: SummaryStats,
    pub max_abs_deviation: f64,
    /// Fraction of replications with `|lambda1(centered) - b| <= tolerance`.
    pub within_rate: f64,
    pub checks: Vec<Check>,
}

impl EdgeReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Top eigenvalue of the covariance of `X - mu` against the upper bulk edge.
pub fn centered_edge_check(config: &ExperimentConfig) -> Result<EdgeReport> {
    config.validate()?;
    let params = config.params;
    let solver = config.solver;
    let values = replicate(config.parallelism, config.replications, |i| {
        let x = replication::replication_matrix(&params, i)?;
        centered_top_eigenvalue(&x, params.mu, solver).map_err(|e| e.in_replication(i))
    })?;
    let t = config.theory();
    let tol = &config.tolerances;
    let band = tol.get("centered-edge");
    let deviations: Vec<f64> = values.iter().map(|v| (v - t.b).abs()).collect();
    let within = deviations.iter().filter(|&&d| d <= band).count();
    let within_rate = within as f64 / values.len() as f64;
    let max_abs_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(EdgeReport {
        replications: config.replications,
        target: t.b,
        summary: stats::summarize(&values)?,
        max_abs_deviation,
        within_rate,
        checks: vec![Check::at_least("centered_edge_rate", within_rate, tol.get("centered-rate"))],
    })
}
