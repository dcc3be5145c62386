use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("model is not normalized at its place")]
    NotNormalized,
    #[error("place does not apply to this coefficient field: {0}")]
    PlaceMismatch(String),
    #[error("fractional step {step} needs a ramified extension of a p-adic field")]
    RamificationNeeded { step: String },
    #[error("no semistable model after {steps} steps: {diagnostic}")]
    NonTerminating { steps: usize, diagnostic: String },
    #[error("generic fiber is not semistable")]
    GenericFiberNotSemistable,
    #[error("stability undetermined: {0}")]
    Undetermined(String),
    #[error("determinant {0} is not a unit of the Laurent ring")]
    NotACocycle(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("fiber is not semistable at {0}")]
    BadFiber(String),
    #[error("transition matrix does not glue the two charts")]
    TransitionFails,
    #[error("fixed locus is degenerate: {0}")]
    DegenerateFixedLocus(String),
    #[error("map is not polynomial")]
    NotPolynomial,
    #[error("fixed points are not distinct")]
    DegenerateConfiguration,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
