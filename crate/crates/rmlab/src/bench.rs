//! Wall-clock comparison of the `O(pn)` estimators with a full eigensolution.

use std::hint::black_box;
use std::time::{Duration, Instant};

use rmlab_core::linalg::{self, DEFAULT_SIZE_LIMIT};
use rmlab_core::replication::replication_matrix;
use rmlab_core::stats::median;
use rmlab_core::{MatrixParams, RealMatrix};
use serde::Serialize;

use crate::error::{Error, Result};

/// Each timed sample loops until at least this long has passed.
const MIN_SAMPLE: Duration = Duration::from_micros(200);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchResult {
    pub p: usize,
    pub n: usize,
    pub repeat: usize,
    /// Median seconds for both estimators.
    pub t_estimators: f64,
    /// Median seconds for the covariance and its full spectrum.
    pub t_full_eigen: f64,
    /// `t_full_eigen / t_estimators`.
    pub speedup: f64,
}

/// Median seconds per call of `f` over `repeat` samples, after one warm-up.
fn time_median<F: FnMut()>(repeat: usize, mut f: F) -> f64 {
    f();
    let mut samples = Vec::with_capacity(repeat);
    for _ in 0..repeat {
        let start = Instant::now();
        let mut calls = 0u32;
        while calls == 0 || start.elapsed() < MIN_SAMPLE {
            f();
            calls += 1;
        }
        samples.push(start.elapsed().as_secs_f64() / calls as f64);
    }
    median(&samples).expect("repeat >= 1")
}

fn estimators(x: &RealMatrix) -> rmlab_core::Result<(f64, f64)> {
    let sums = linalg::row_sums(x);
    Ok((sums.estimator_one(), sums.estimator_two()?))
}

/// Full spectrum on the smaller Gram side.
fn full_eigen(x: &RealMatrix) -> rmlab_core::Result<Vec<f64>> {
    let w = if x.cols() >= x.rows() { linalg::covariance(x) } else { linalg::dual_gram(x) };
    linalg::full_spectrum(&w, DEFAULT_SIZE_LIMIT)
}

/// Times both paths on the same sampled matrix (stream `(seed, 0)`).
pub fn run_bench(params: &MatrixParams, repeat: usize) -> Result<BenchResult> {
    if repeat < 3 {
        return Err(Error::Usage(format!("--repeat must be at least 3, got {repeat}")));
    }
    params.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let dim = params.p.min(params.n);
    if dim > DEFAULT_SIZE_LIMIT {
        return Err(rmlab_core::Error::SizeExceeded { dim, limit: DEFAULT_SIZE_LIMIT }.into());
    }
    let x = replication_matrix(params, 0)?;
    // surface numerical failures once, outside the timed loops
    estimators(&x)?;
    full_eigen(&x)?;

    let t_estimators = time_median(repeat, || {
        black_box(estimators(black_box(&x)).ok());
    });
    let t_full_eigen = time_median(repeat, || {
        black_box(full_eigen(black_box(&x)).ok());
    });
    Ok(BenchResult {
        p: params.p,
        n: params.n,
        repeat,
        t_estimators,
        t_full_eigen,
        speedup: t_full_eigen / t_estimators,
    })
}
