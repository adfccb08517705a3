use thiserror::Error;

/// Errors raised by the library.
///
/// Variants map onto the failure classes of each operation; numeric payloads carry
/// the magnitude that tripped the check so callers can report it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("tuple member {0} is not a pure state")]
    NotPureTuple(usize),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("diagonal entry {index} deviates from 1 by {deviation:e}")]
    NotNormalized { index: usize, deviation: f64 },
    #[error("vector norm deviates from 1 by {0:e}")]
    NotUnitNorm(f64),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace deviates from 1 by {0:e}")]
    InvalidTrace(f64),
    #[error("dimension {dim} does not factor as {da} x {db}")]
    InvalidFactorization { dim: usize, da: usize, db: usize },
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("index {index} out of range for tuple of length {len}")]
    InvalidIndex { index: usize, len: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("consecutive overlap {0} -> {1} vanishes")]
    DegenerateCycle(usize, usize),
    #[error("Bargmann invariant vanishes")]
    ZeroInvariant,
    #[error("order {0} is not supported (need n >= 3)")]
    InvalidOrder(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("order {0} is not supported by the envelope family (n must be 3 or 4)")]
    UnsupportedOrder(usize),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("invariant oracle is inconsistent on edge ({i}, {j}): |phase| = {modulus}")]
    InconsistentOracle { i: usize, j: usize, modulus: f64 },
    #[error("canonical Gram matrix is not realizable (min eigenvalue {0:e})")]
    NotRealizable(f64),
    #[error("word budget exceeded: {count} words > cap {cap}")]
    BudgetExceeded { count: usize, cap: usize },
    #[error("circuit dimension {dim} exceeds cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("independent evaluation routes disagree: {0}")]
    CrossCheck(String),
    #[error("state of dimension {0} is not a qubit")]
    NotAQubit(usize),
    #[error("state of dimension {0} is not a two-qubit state")]
    NotTwoQubit(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
