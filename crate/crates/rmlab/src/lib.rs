//! Monte Carlo experiments, result files and the command line for
//! [`rmlab_core`].
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]:
//! replication `i` always draws from stream `(seed, i)`, so reports do not
//! depend on the number of worker threads.

// `!(x > y)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;

pub use error::{Error, Result};
pub use experiments::{Check, ExperimentConfig, Tolerances, Verdict};
