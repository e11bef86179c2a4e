//! One Monte Carlo replication: a deterministic function of
//! `(params, index)`.

use crate::error::Result;
use crate::linalg::{self, EigenPairTop, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::matgen::{center, derive_stream, sample_matrix, MatrixParams, RealMatrix};
use crate::theory::estimator_expectation;

/// Per-replication spectral record.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralSample {
    #[cfg_attr(feature = "serde", serde(rename = "rep"))]
    pub rep_index: u64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `sum_i W_i / p`.
    pub est1: f64,
    /// `sum_i W_i^2 / sum_i W_i`.
    pub est2: f64,
    /// Top eigenvalue of the centered covariance `(X - mu)(X - mu)^T / n`.
    pub lambda1_centered: f64,
    /// `sum_i (W_i - l)^2` with `l = p mu^2 + sigma^2`.
    pub sum_sq_dev: f64,
}

/// Eigensolver settings shared by every replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

/// A replication together with the matrix and eigenpair it came from.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub sample: SpectralSample,
    pub x: RealMatrix,
    pub pair: EigenPairTop,
}

/// Draws the matrix of replication `index`.
pub fn replication_matrix(params: &MatrixParams, index: u64) -> Result<RealMatrix> {
    let mut stream = derive_stream(params.seed, index);
    sample_matrix(params, &mut stream)
}

/// Largest eigenvalue of `(X - mu)(X - mu)^T / n`, on the smaller Gram side.
pub fn centered_top_eigenvalue(x: &RealMatrix, mu: f64, opts: SolverOptions) -> Result<f64> {
    let xc = center(x, mu);
    let gram = if xc.cols() >= xc.rows() { linalg::covariance(&xc) } else { linalg::dual_gram(&xc) };
    linalg::dominant_eigenvalue(&gram, opts.tol, opts.max_iter)
}

pub fn run_replication_detailed(params: &MatrixParams, index: u64, opts: SolverOptions) -> Result<Replicate> {
    let body = || -> Result<Replicate> {
        let x = replication_matrix(params, index)?;
        let sums = linalg::row_sums(&x);
        let est1 = sums.estimator_one();
        let est2 = sums.estimator_two()?;
        let pair = linalg::top_two_eigenvalues(&x, opts.tol, opts.max_iter)?;
        let lambda1_centered = centered_top_eigenvalue(&x, params.mu, opts)?;
        let l = estimator_expectation(params.p, params.mu, params.sigma);
        let sample = SpectralSample {
            rep_index: index,
            lambda1: pair.lambda1,
            lambda2: pair.lambda2,
            est1,
            est2,
            lambda1_centered,
            sum_sq_dev: sums.sum_sq_dev(l),
        };
        Ok(Replicate { sample, x, pair })
    };
    body().map_err(|e| e.in_replication(index))
}

/// Samples `X` from stream `(params.seed, index)` and computes both
/// estimators, `lambda_1`, `lambda_2`, the centered top eigenvalue and
/// `sum_i (W_i - l)^2`.
pub fn run_replication(params: &MatrixParams, index: u64) -> Result<SpectralSample> {
    run_replication_with(params, index, SolverOptions::default())
}

pub fn run_replication_with(params: &MatrixParams, index: u64, opts: SolverOptions) -> Result<SpectralSample> {
    run_replication_detailed(params, index, opts).map(|r| r.sample)
}

/// Estimators and `lambda_1` only.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorSample {
    pub rep_index: u64,
    pub lambda1: f64,
    pub est1: f64,
    pub est2: f64,
}

/// The subset of [`run_replication`] needed for error-rate studies; skips the
/// slowly converging `lambda_2` and centered eigenvalue.
pub fn run_estimator_replication(params: &MatrixParams, index: u64, opts: SolverOptions) -> Result<EstimatorSample> {
    let body = || -> Result<EstimatorSample> {
        let x = replication_matrix(params, index)?;
        let sums = linalg::row_sums(&x);
        let lambda1 = linalg::top_eigenvalue(&x, opts.tol, opts.max_iter)?;
        Ok(EstimatorSample {
            rep_index: index,
            lambda1,
            est1: sums.estimator_one(),
            est2: sums.estimator_two()?,
        })
    };
    body().map_err(|e| e.in_replication(index))
}
