use std::fmt;

use thiserror::Error;

use crate::expr_parse::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which configured bound was hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    SPairs,
    Terms,
    WallClock,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::SPairs => "S-pair budget",
            LimitKind::Terms => "term-count budget",
            LimitKind::WallClock => "wall-clock budget",
        })
    }
}

/// Progress at the moment a resource limit tripped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Progress {
    pub pairs_processed: usize,
    pub pairs_pending: usize,
    pub basis_size: usize,
    pub largest_poly: usize,
    pub elapsed_ms: u128,
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pairs processed, {} pending, basis size {}, largest polynomial {} terms, {} ms",
            self.pairs_processed, self.pairs_pending, self.basis_size, self.largest_poly, self.elapsed_ms
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent overflow: exponent leaves the signed 32-bit range")]
    ExponentOverflow,

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0}: the zero polynomial is not allowed here")]
    ZeroPolynomial(&'static str),

    #[error("resource limit exceeded ({kind}): {progress}")]
    ResourceLimit { kind: LimitKind, progress: Progress },

    #[error("no pure recurrence found within limits: the elimination basis contains no polynomial free of the eliminated variables ({progress})")]
    NoRecurrence { progress: Progress },

    #[error("shifted index {0:?} leaves the nonnegative orthant")]
    OutOfDomain(Vec<i64>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn mismatch(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}
