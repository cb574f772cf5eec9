use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("integer is not a perfect square")]
    NotASquare,

    #[error("vector is not simple")]
    NotSimple,

    #[error("vector is zero")]
    ZeroVector,

    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),

    #[error("sheet discovery gave up after {samples} samples")]
    RetryExhausted { samples: usize },

    #[error("shape has a unit factor; sheets are trivial")]
    TrivialShape,

    #[error("malformed sheet structure: {0}")]
    Malformed(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),

    #[error("vector is not a member of the required sheet")]
    MembershipViolated,

    #[error("matrix is rank deficient")]
    RankDeficient,

    #[error("coefficient matrix of a simple vector has rank {0}")]
    RankViolation(usize),

    #[error("round trip mismatch: {0}")]
    Mismatch(String),

    #[error("shape mismatch between instances or morphism")]
    ShapeMismatch,

    #[error("morphism does not carry sheets onto sheets")]
    SheetNotPreserved,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
