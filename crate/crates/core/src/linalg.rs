//! Covariance construction, the row-sum estimators of the top eigenvalue,
//! reference eigensolvers and the decomposition of the all-ones vector.
//!
//! With `W = X X^T / n` and `W_i` the `i`-th row sum of `W`,
//!
//! * `est1 = sum_i W_i / p = 1^T W 1 / 1^T 1` (one power step from `1`),
//! * `est2 = sum_i W_i^2 / sum_i W_i = ||W 1||^2 / 1^T W 1` (two steps).
//!
//! Both only need the column sums `s_k = sum_i X_ik`: `W_i = (1/n) sum_k X_ik s_k`
//! and `sum_i W_i = (1/n) sum_k s_k^2`, so neither ever forms `W`.
//!
//! For any PSD `W` with `1^T W 1 > 0`, `est1 <= est2 <= lambda_1(W)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matgen::{derive_stream, RealMatrix};

/// Default limit on the dimension accepted by [`full_spectrum`].
pub const DEFAULT_SIZE_LIMIT: usize = 1024;
/// Default relative tolerance of the power iteration.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap of the power iteration.
pub const DEFAULT_MAX_ITER: usize = 100_000;

const FALLBACK_START_SEED: u64 = 0x0005_EED0_FF41_1BAC;

/// Dot product with a fixed four-way summation order.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
}

fn unit(mut x: Vec<f64>) -> Vec<f64> {
    let n = norm(&x);
    if n > 0.0 {
        scale(1.0 / n, &mut x);
    }
    x
}

fn scale(alpha: f64, x: &mut [f64]) {
    for v in x {
        *v *= alpha;
    }
}

/// Dense symmetric matrix stored in full, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Checks exact symmetry of the stored entries.
    pub fn from_full(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch { expected: dim * dim, actual: data.len() });
        }
        for i in 0..dim {
            for j in 0..dim {
                let v = data[i * dim + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if j > i && v != data[j * dim + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymmetricMatrix { dim, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let data: Vec<f64> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        SymmetricMatrix::from_full(rows.len(), data)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut data = vec![0.0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = d;
        }
        SymmetricMatrix::from_full(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// `y = S x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// Plain row sums `S 1`.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.row(i).iter().sum()).collect()
    }
}

/// `scale * A A^T` for the rows of `A`, upper triangle computed then mirrored.
fn scaled_outer(a: &RealMatrix, scale: f64) -> SymmetricMatrix {
    let m = a.rows();
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        let ri = a.row(i);
        for j in i..m {
            let v = dot(ri, a.row(j)) * scale;
            data[i * m + j] = v;
            data[j * m + i] = v;
        }
    }
    SymmetricMatrix { dim: m, data }
}

/// `W = X X^T / n` (`p x p`).
pub fn covariance(x: &RealMatrix) -> SymmetricMatrix {
    scaled_outer(x, 1.0 / x.cols() as f64)
}

/// The dual Gram matrix `X^T X / n` (`n x n`). Shares its nonzero
/// eigenvalues with [`covariance`].
pub fn dual_gram(x: &RealMatrix) -> SymmetricMatrix {
    scaled_outer(&x.transpose(), 1.0 / x.cols() as f64)
}

/// Row sums `W_i` of `W = X X^T / n`, computed in `O(pn)` from column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct RowSumVector {
    pub values: Vec<f64>,
    pub total: f64,
}

impl RowSumVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_i W_i / p`.
    pub fn estimator_one(&self) -> f64 {
        self.total / self.values.len() as f64
    }

    /// `sum_i W_i^2 / sum_i W_i`.
    pub fn estimator_two(&self) -> Result<f64> {
        let p = self.values.len() as f64;
        if !(libm::fabs(self.total) >= 1e-12 * p) {
            return Err(Error::DegenerateDenominator { total: self.total });
        }
        Ok(dot(&self.values, &self.values) / self.total)
    }

    /// `sum_i (W_i - l)^2 = ||W 1 - l 1||^2`.
    pub fn sum_sq_dev(&self, l: f64) -> f64 {
        self.values.iter().map(|w| (w - l) * (w - l)).sum()
    }
}

/// Column sums `s_k = sum_i X_ik`.
pub fn column_sums(x: &RealMatrix) -> Vec<f64> {
    let mut s = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        axpy(1.0, x.row(i), &mut s);
    }
    s
}

pub fn row_sums(x: &RealMatrix) -> RowSumVector {
    let s = column_sums(x);
    let inv_n = 1.0 / x.cols() as f64;
    let values = (0..x.rows()).map(|i| dot(x.row(i), &s) * inv_n).collect();
    let total = dot(&s, &s) * inv_n;
    RowSumVector { values, total }
}

/// `sum_k s_k^2 / (n p)`, without forming `W`.
pub fn estimator_one(x: &RealMatrix) -> f64 {
    let s = column_sums(x);
    dot(&s, &s) / (x.cols() as f64 * x.rows() as f64)
}

pub fn estimator_two(x: &RealMatrix) -> Result<f64> {
    row_sums(x).estimator_two()
}

/// Top two eigenvalues of `W` with the unit top eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairTop {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Unit eigenvector of `lambda1` in `R^p`, signed so that `1^T v1 >= 0`.
    pub v1: Vec<f64>,
    pub iterations: usize,
    /// `||W v1 - lambda1 v1||`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
struct PowerResult {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
}

/// Which convergence test a power run must pass.
#[derive(Debug, Clone, Copy)]
enum Stop {
    /// Rayleigh quotient stalls and the residual is below `tol * theta`.
    Strict,
    /// Rayleigh quotient stalls (relative change below `tol`).
    Quotient,
}

/// Power iteration on `s`, optionally restricted to the orthogonal
/// complement of the unit vector `deflate`.
fn power_iterate(
    s: &SymmetricMatrix,
    start: &[f64],
    deflate: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
    stop: Stop,
) -> Result<PowerResult> {
    let dim = s.dim();
    let mut x = start.to_vec();
    if let Some(u) = deflate {
        axpy(-dot(u, &x), u, &mut x);
    }
    let nx = max_abs(&x);
    if !(nx > 0.0) || !nx.is_finite() {
        return Err(Error::NoConvergence { iterations: 0 });
    }
    // max-norm scaling keeps constant vectors exact
    scale(1.0 / nx, &mut x);

    let floor = f64::EPSILON * s.frobenius_norm() * (dim as f64);
    let mut y = vec![0.0; dim];
    let mut prev = f64::NAN;
    for it in 1..=max_iter {
        s.mul_vec_into(&x, &mut y);
        if let Some(u) = deflate {
            axpy(-dot(u, &y), u, &mut y);
        }
        let xx = dot(&x, &x);
        let xn = libm::sqrt(xx);
        let theta = dot(&x, &y) / xx;
        if norm(&y) <= floor * xn {
            // x lies (numerically) in the null space of the operator
            return Ok(PowerResult { value: 0.0, vector: unit(x), iterations: it });
        }
        let mut r2 = 0.0;
        for (yi, xi) in y.iter().zip(&x) {
            let d = yi - theta * xi;
            r2 += d * d;
        }
        let residual = libm::sqrt(r2) / xn;
        let stalled = libm::fabs(theta - prev) <= tol * libm::fabs(theta);
        let converged = match stop {
            Stop::Strict => stalled && residual <= tol * libm::fabs(theta) + floor,
            Stop::Quotient => stalled,
        };
        if converged {
            return Ok(PowerResult { value: theta, vector: unit(x), iterations: it });
        }
        prev = theta;
        let ny = max_abs(&y);
        x.copy_from_slice(&y);
        scale(1.0 / ny, &mut x);
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

fn fallback_start(dim: usize) -> Vec<f64> {
    let mut stream = derive_stream(FALLBACK_START_SEED, dim as u64);
    (0..dim).map(|_| stream.next_normal()).collect()
}

/// Strict power run from `start`, retried once from a seeded random vector.
fn dominant_pair(s: &SymmetricMatrix, start: &[f64], tol: f64, max_iter: usize) -> Result<PowerResult> {
    match power_iterate(s, start, None, tol, max_iter, Stop::Strict) {
        Ok(r) => Ok(r),
        Err(Error::NoConvergence { iterations }) => {
            power_iterate(s, &fallback_start(s.dim()), None, tol, max_iter, Stop::Strict).map_err(|e| match e {
                Error::NoConvergence { iterations: second } => Error::NoConvergence { iterations: iterations + second },
                other => other,
            })
        }
        Err(e) => Err(e),
    }
}

/// Second eigenvalue via deflation against the unit vector `u1`.
fn second_value(s: &SymmetricMatrix, u1: &[f64], tol: f64, max_iter: usize) -> Result<PowerResult> {
    let dim = s.dim();
    if dim < 2 {
        return Ok(PowerResult { value: 0.0, vector: vec![0.0; dim], iterations: 0 });
    }
    let ones = vec![1.0; dim];
    let mut start = ones.clone();
    axpy(-dot(u1, &start), u1, &mut start);
    // 1 can coincide with u1 (rank-one input); use a generic vector then
    if norm(&start) <= 1e-8 * norm(&ones) {
        start = fallback_start(dim);
    }
    match power_iterate(s, &start, Some(u1), tol, max_iter, Stop::Quotient) {
        Err(Error::NoConvergence { iterations }) => {
            power_iterate(s, &fallback_start(dim), Some(u1), tol, max_iter, Stop::Quotient).map_err(|e| match e {
                Error::NoConvergence { iterations: second } => Error::NoConvergence { iterations: iterations + second },
                other => other,
            })
        }
        other => other,
    }
}

/// Top two eigenvalues of an explicit symmetric PSD matrix by power
/// iteration and deflation, starting from `start` (or the normalized
/// all-ones vector).
///
/// The returned eigenvector lives in the space of `s`; its residual is taken
/// against `s`.
pub fn symmetric_top_two(s: &SymmetricMatrix, start: Option<&[f64]>, tol: f64, max_iter: usize) -> Result<EigenPairTop> {
    let ones;
    let start = match start {
        Some(v) => v,
        None => {
            ones = vec![1.0; s.dim()];
            &ones
        }
    };
    let top = dominant_pair(s, start, tol, max_iter)?;
    let second = second_value(s, &top.vector, tol, max_iter)?;
    let mut v1 = top.vector;
    if v1.iter().sum::<f64>() < 0.0 {
        scale(-1.0, &mut v1);
    }
    let residual = residual_norm(&s.mul_vec(&v1), top.value, &v1);
    Ok(EigenPairTop {
        lambda1: top.value,
        lambda2: second.value,
        v1,
        iterations: top.iterations + second.iterations,
        residual,
    })
}

fn residual_norm(wv: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let mut r2 = 0.0;
    for (a, b) in wv.iter().zip(v) {
        let d = a - lambda * b;
        r2 += d * d;
    }
    libm::sqrt(r2)
}

/// `W v = X (X^T v) / n` without forming `W`.
fn cov_mul_vec(x: &RealMatrix, v: &[f64]) -> Vec<f64> {
    let mut xt_v = vec![0.0; x.cols()];
    for (i, &vi) in v.iter().enumerate() {
        axpy(vi, x.row(i), &mut xt_v);
    }
    let inv_n = 1.0 / x.cols() as f64;
    (0..x.rows()).map(|i| dot(x.row(i), &xt_v) * inv_n).collect()
}

/// `lambda_1`, `lambda_2` and `v1` of `W = X X^T / n`.
///
/// The power iteration runs on the smaller of the two Gram matrices
/// (`X^T X / n` when `n < p`). On the `p` side it starts from `1`; on the `n`
/// side from `X^T 1`, the image of `1`. `lambda_1` stops once the Rayleigh
/// quotient stalls to `tol` and `||W v - lambda v|| <= tol * lambda`;
/// `lambda_2` is found by projecting out the converged vector at every step
/// and stops once its Rayleigh quotient stalls. A start that fails to
/// converge is retried from a seeded random vector.
pub fn top_two_eigenvalues(x: &RealMatrix, tol: f64, max_iter: usize) -> Result<EigenPairTop> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("tol must be positive"));
    }
    let (p, n) = (x.rows(), x.cols());
    if n >= p {
        return symmetric_top_two(&covariance(x), None, tol, max_iter);
    }

    let g = dual_gram(x);
    let s = column_sums(x);
    let start = if norm(&s) > 0.0 { s } else { vec![1.0; n] };
    let top = dominant_pair(&g, &start, tol, max_iter)?;
    let second = second_value(&g, &top.vector, tol, max_iter)?;

    // map u -> X u / ||X u||
    let mut v1: Vec<f64> = (0..p).map(|i| dot(x.row(i), &top.vector)).collect();
    let nv = norm(&v1);
    if nv > 0.0 {
        scale(1.0 / nv, &mut v1);
    } else {
        // X u = 0 only when lambda_1 = 0, i.e. X = 0
        v1 = vec![1.0 / libm::sqrt(p as f64); p];
    }
    if v1.iter().sum::<f64>() < 0.0 {
        scale(-1.0, &mut v1);
    }
    let residual = residual_norm(&cov_mul_vec(x, &v1), top.value, &v1);
    Ok(EigenPairTop {
        lambda1: top.value,
        lambda2: second.value,
        v1,
        iterations: top.iterations + second.iterations,
        residual,
    })
}

/// `lambda_1` of `W = X X^T / n` alone, with the same start and stopping rule
/// as [`top_two_eigenvalues`].
pub fn top_eigenvalue(x: &RealMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams("tol must be positive"));
    }
    if x.cols() >= x.rows() {
        let ones = vec![1.0; x.rows()];
        return dominant_pair(&covariance(x), &ones, tol, max_iter).map(|r| r.value);
    }
    let s = column_sums(x);
    let start = if norm(&s) > 0.0 { s } else { vec![1.0; x.cols()] };
    dominant_pair(&dual_gram(x), &start, tol, max_iter).map(|r| r.value)
}

/// Largest eigenvalue of `s` by power iteration from `1`, stopped once the
/// Rayleigh quotient stalls to `tol`.
///
/// Meant for bulk spectra (centered data), where the top eigenvalue sits at a
/// cluster edge; there the eigenvalue converges long before the vector.
pub fn dominant_eigenvalue(s: &SymmetricMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let ones = vec![1.0; s.dim()];
    match power_iterate(s, &ones, None, tol, max_iter, Stop::Quotient) {
        Ok(r) => Ok(r.value),
        Err(Error::NoConvergence { .. }) => {
            power_iterate(s, &fallback_start(s.dim()), None, tol, max_iter, Stop::Quotient).map(|r| r.value)
        }
        Err(e) => Err(e),
    }
}

/// All eigenvalues of `w`, descending, by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius norm is below `1e-12 ||W||_F`.
pub fn full_spectrum(w: &SymmetricMatrix, size_limit: usize) -> Result<Vec<f64>> {
    const MAX_SWEEPS: usize = 100;
    let m = w.dim();
    if m > size_limit {
        return Err(Error::SizeExceeded { dim: m, limit: size_limit });
    }
    let mut a = w.data.clone();
    let target = 1e-12 * w.frobenius_norm();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                s += 2.0 * a[i * m + j] * a[i * m + j];
            }
        }
        libm::sqrt(s)
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps });
        }
        sweeps += 1;
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * m + p], a[q * m + q]);
                // tan of the rotation angle, smaller root
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                // rows p and q, then mirror into columns
                for k in 0..m {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[p * m + k];
                    let akq = a[q * m + k];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    a[p * m + k] = np;
                    a[q * m + k] = nq;
                    a[k * m + p] = np;
                    a[k * m + q] = nq;
                }
                a[p * m + p] = app - t * apq;
                a[q * m + q] = aqq + t * apq;
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
            }
        }
    }
    let mut values: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Split of `1` along the top eigenvector: `1 = v + r` with `v = (1^T v1) v1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnesDecomposition {
    pub v_component: Vec<f64>,
    pub r: Vec<f64>,
    pub r_norm_sq: f64,
    /// Relative defect of
    /// `||W1 - l1||^2 = (lambda1 - l)^2 ||v||^2 + ||W r - l r||^2`.
    pub identity_residual: f64,
}

impl OnesDecomposition {
    /// `|(v, r)| / (||v|| ||r||)`, zero when either part vanishes.
    pub fn orthogonality_defect(&self) -> f64 {
        let denom = norm(&self.v_component) * norm(&self.r);
        if denom == 0.0 {
            0.0
        } else {
            libm::fabs(dot(&self.v_component, &self.r)) / denom
        }
    }
}

pub fn decompose_ones(w: &SymmetricMatrix, pair: &EigenPairTop, l: f64) -> OnesDecomposition {
    let dim = w.dim();
    let v1 = &pair.v1;
    let proj: f64 = v1.iter().sum();
    let v_component: Vec<f64> = v1.iter().map(|v| proj * v).collect();
    let r: Vec<f64> = v_component.iter().map(|v| 1.0 - v).collect();
    let r_norm_sq = dot(&r, &r);

    let ones = vec![1.0; dim];
    let w1 = w.mul_vec(&ones);
    let lhs: f64 = w1.iter().map(|x| (x - l) * (x - l)).sum();
    let wr = w.mul_vec(&r);
    let rest: f64 = wr.iter().zip(&r).map(|(a, b)| (a - l * b) * (a - l * b)).sum();
    let rhs = (pair.lambda1 - l) * (pair.lambda1 - l) * dot(&v_component, &v_component) + rest;
    let defect = libm::fabs(lhs - rhs);
    let identity_residual = if lhs > 0.0 { defect / lhs } else { defect };
    OnesDecomposition { v_component, r, r_norm_sq, identity_residual }
}
