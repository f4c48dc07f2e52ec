use crate::linops::Label;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected} vectors, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("non-finite coordinate in vector {position}")]
    NonFinite { position: usize },
    #[error("duplicate label {0}")]
    DuplicateLabel(Label),
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("position {position} out of range for a family of {len} vectors")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("family is empty")]
    EmptyFamily,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("vector at position {position} is not unit norm (squared norm {norm_sq})")]
    NotUnitNorm { position: usize, norm_sq: f64 },
    #[error("family is not linearly independent (margin {margin:e})")]
    LinearlyDependent { margin: f64 },
    #[error("step {k} out of range 1..={max}")]
    StepOutOfRange { k: usize, max: usize },
    #[error("every index lies in the same block; no crossing index exists")]
    NoCrossing,
    #[error(
        "vectors at positions {position} and {next} are not a consecutive-overlap pair: {reason}"
    )]
    NotConsecutiveOverlap {
        position: usize,
        next: usize,
        reason: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("{0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("scalar field mismatch: file holds {found:?} vectors, expected {expected:?}")]
    ScalarMismatch {
        expected: crate::linops::ScalarKind,
        found: crate::linops::ScalarKind,
    },
}
