use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("variable {0} is not assigned")]
    UnboundVariable(usize),
    #[error("cannot invert non-monomial Laurent polynomial")]
    NotInvertible,
    #[error("jet orders differ: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("multivectors live on different charts ({0} vs {1})")]
    ChartMismatch(usize, usize),
    #[error("bracket with a degree-0 multivector")]
    DegreeZero,
    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("chart map {source_chart}->{target_chart} has no declared inverse")]
    MissingInverse { source_chart: usize, target_chart: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("base bivector is not homogeneous for the torus grading")]
    InhomogeneousBase,
    #[error("atlas is not supported by the cohomology engine: {0}")]
    UnsupportedAtlas(String),
    #[error("cochain is not a cocycle")]
    NotACocycle,
    #[error("cochain has support outside the computed truncation (weight {0:?})")]
    OutOfTruncation(Vec<i64>),
    #[error("prerequisite violated: {0}")]
    PrerequisiteViolated(String),
    #[error("Poisson Kodaira-Spencer map is not surjective (rank {rank}, dim H^1 = {dim})")]
    NotSurjective { rank: usize, dim: usize },
    #[error("order {order} could not be solved: {detail}")]
    UnsolvableOrder { order: u32, detail: String },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}
