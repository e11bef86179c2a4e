use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
    #[error("matrix has no entries")]
    EmptyMatrix,
    #[error("shape mismatch: expected {expected} entries, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("row-sum total {total:e} is too close to zero")]
    DegenerateDenominator { total: f64 },
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix dimension {dim} exceeds size limit {limit}")]
    SizeExceeded { dim: usize, limit: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("log-log fit needs at least two points with positive coordinates")]
    NonPositiveInput,
    #[error("bad histogram range")]
    BadRange,
    #[error("replication {index} failed: {source}")]
    Replication { index: u64, source: Box<Error> },
}

impl Error {
    /// Tags `self` with the replication it came from.
    pub fn in_replication(self, index: u64) -> Error {
        Error::Replication { index, source: Box::new(self) }
    }
}
