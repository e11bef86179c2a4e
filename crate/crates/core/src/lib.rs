//! Spectral toolkit for noncentral sample covariance matrices.
//!
//! For a `p x n` matrix `X` with i.i.d. `N(mu, sigma^2)` entries and
//! `W = X X^T / n`, this crate provides:
//!
//! * [`matgen`]: reproducible matrix sampling from per-replication seed streams,
//! * [`linalg`]: the covariance matrix, the two `O(pn)` row-sum estimators of
//!   the largest eigenvalue, power iteration with deflation, a cyclic Jacobi
//!   eigensolver and the decomposition of the all-ones vector along the top
//!   eigenvector,
//! * [`theory`]: closed forms for the largest-eigenvalue normal law and the
//!   Marchenko-Pastur law,
//! * [`stats`]: summaries, the normal CDF, Kolmogorov-Smirnov distance,
//!   histograms and log-log rate fits,
//! * [`replication`]: one Monte Carlo replication as a pure function of
//!   `(params, index)`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > y)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod matgen;
pub mod quad;
pub mod replication;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::{EigenPairTop, OnesDecomposition, RowSumVector, SymmetricMatrix};
pub use matgen::{MatrixParams, RealMatrix, SeedStream};
pub use replication::SpectralSample;
pub use theory::TheoryParams;
