use thiserror::Error;

use crate::phi::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("projection of the candidate onto m vanishes")]
    ZeroProjection,

    #[error("outside the metric domain: {0}")]
    OutsideDomain(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("Killing form is degenerate on h (smallest singular value {smallest_singular_value:e})")]
    DegenerateOnH { smallest_singular_value: f64 },

    #[error("h is not a subalgebra (violation {violation:e})")]
    NotSubalgebra { violation: f64 },

    #[error("[h, m] is not contained in m (violation {violation:e})")]
    NotInvariantComplement { violation: f64 },

    #[error("h and m bases do not span g")]
    NotComplementary,

    #[error("inner product is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("navigation vector is not h-unit (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("drift vector is not Ad(H)-invariant (violation {violation:e})")]
    InvariantVectorViolation { violation: f64 },

    #[error("no admissible bracket for M(t) = 0 was found: {trace}")]
    DomainExhausted { trace: String },

    #[error("certificate failed verification (residual {residual:e})")]
    ResidualTooLarge { residual: f64 },

    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("Ricci eigenvalues are not distinct (smallest gap {gap:e})")]
    RicciDegenerate { gap: f64 },

    #[error("algebra is not semisimple")]
    NotSemisimple,

    #[error("axis count {found} does not match the predicted {predicted}")]
    PredictionMismatch { predicted: usize, found: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),
}
