use thiserror::Error;

/// Errors raised when an operation's precondition does not hold.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("columns are linearly dependent (rank deficient)")]
    RankDeficient,
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not contained in the span of the lattice")]
    NotInSpan,
    #[error("sub-basis does not span a saturated sublattice")]
    NotSaturated,
    #[error("lattice classes span different subspaces")]
    DistinctSpans,
    #[error("lattice is not diagonal with respect to the standard frame")]
    NotDiagonal,
    #[error("point has non-integer coordinates, so it is not a vertex")]
    NotVertex,
    #[error("norm point has non-integer weights, so it is not a vertex")]
    NonIntegerWeights,
    #[error("index set {sub:?} is not contained in {sup:?}")]
    NotSubset { sub: Vec<usize>, sup: Vec<usize> },
    #[error("index {0} lies outside the support of the point")]
    OutsideSupport(usize),
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("invalid root ({0}, {1})")]
    InvalidRoot(usize, usize),
    #[error("point does not lie in the closed corner E_{0}")]
    NotInCorner(usize),
    #[error("invalid chart value: {0}")]
    InvalidChart(String),
    #[error("contraction parameter {0} outside [0, 1]")]
    ParameterOutOfRange(String),
    #[error("empty point set")]
    EmptySet,
    #[error("element does not preserve the coordinate subspace V_I")]
    SubspaceNotPreserved,
    #[error("invalid direction: {0}")]
    InvalidDirection(String),
    #[error("guardrail exceeded: {0} (pass an override to lift it)")]
    Guardrail(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
