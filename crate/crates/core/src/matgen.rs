//! Reproducible generation of Gaussian data matrices.
//!
//! Every replication `i` of an experiment with master seed `s` draws from its
//! own [`SeedStream`], derived by [`derive_stream`]. A stream is a SplitMix64
//! generator whose initial state is the `(i + 1)`-th SplitMix64 output of `s`,
//! so streams of distinct indices start at avalanche-mixed, unrelated states.
//!
//! Normal deviates come from the Marsaglia polar method on 53-bit uniforms,
//! using `libm` for `log` and `sqrt`, which keeps the draws bit-identical across
//! platforms. Matrices are filled row-major.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Dimensions, entry law and master seed of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatrixParams {
    pub p: usize,
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl MatrixParams {
    pub fn new(p: usize, n: usize, mu: f64, sigma: f64, seed: u64) -> Result<Self> {
        let params = MatrixParams { p, n, mu, sigma, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidParams("p must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1"));
        }
        if !self.mu.is_finite() || self.mu < 0.0 {
            return Err(Error::InvalidParams("mu must be finite and non-negative"));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::InvalidParams("sigma must be finite and non-negative"));
        }
        Ok(())
    }

    /// Aspect ratio `p / n`.
    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    pub fn with_size(self, p: usize, n: usize) -> Self {
        MatrixParams { p, n, ..self }
    }
}

/// SplitMix64 finalizer. Every output bit depends on every input bit and the
/// map is a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-replication random stream.
#[derive(Debug, Clone)]
pub struct SeedStream {
    state: u64,
    origin: (u64, u64),
    rng: SplitMix64,
    spare: Option<f64>,
}

/// Derives the stream for replication `index` of master seed `master`.
///
/// The initial state is `mix64(master + (index + 1) * GOLDEN_GAMMA)`; for
/// `(0, 0)` this is `mix64(GOLDEN_GAMMA) != 0`.
pub fn derive_stream(master: u64, index: u64) -> SeedStream {
    let state = mix64(master.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))));
    SeedStream {
        state,
        origin: (master, index),
        rng: SplitMix64::seed_from_u64(state),
        spare: None,
    }
}

impl SeedStream {
    /// Initial 64-bit state of the stream.
    pub fn state(&self) -> u64 {
        self.state
    }

    /// `(master seed, replication index)` the stream was derived from.
    pub fn origin(&self) -> (u64, u64) {
        self.origin
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate (Marsaglia polar method; deviates come in
    /// pairs, the second one is cached).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s >= 1.0 || s == 0.0 {
                continue;
            }
            let factor = libm::sqrt(-2.0 * libm::log(s) / s);
            self.spare = Some(v * factor);
            return u * factor;
        }
    }
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch { expected: rows * cols, actual: data.len() });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch { expected: cols, actual: r.len() });
            }
            data.extend_from_slice(r);
        }
        RealMatrix::from_vec(rows.len(), cols, data)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        RealMatrix::from_vec(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                data[j * self.rows + i] = v;
            }
        }
        RealMatrix { rows: self.cols, cols: self.rows, data }
    }
}

/// Draws a `p x n` matrix of i.i.d. `N(mu, sigma^2)` entries, row-major.
///
/// With `sigma == 0` no deviates are consumed and every entry is `mu`.
pub fn sample_matrix(params: &MatrixParams, stream: &mut SeedStream) -> Result<RealMatrix> {
    params.validate()?;
    let len = params.p * params.n;
    let data = if params.sigma == 0.0 {
        vec![params.mu; len]
    } else {
        (0..len).map(|_| params.mu + params.sigma * stream.next_normal()).collect()
    };
    RealMatrix::from_vec(params.p, params.n, data)
}

/// `X - mu`, entrywise.
pub fn center(x: &RealMatrix, mu: f64) -> RealMatrix {
    RealMatrix {
        rows: x.rows,
        cols: x.cols,
        data: x.data.iter().map(|v| v - mu).collect(),
    }
}
