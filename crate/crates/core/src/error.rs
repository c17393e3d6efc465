use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Mathematical outcomes such as "f is not majorized by g" are verdicts, not
/// errors; the variants here are contract violations on the inputs, with the
/// single exception of [`Error::InternalInconsistency`], which means two exact
/// decision procedures disagreed and therefore signals a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mass must be strictly positive, got {0}")]
    NegativeMass(String),
    #[error("negative value {0} on a space of infinite measure")]
    NegativeValueOnInfiniteSpace(String),
    #[error("piece masses sum to {sum}, exceeding the total measure {total}")]
    MassExceedsTotal { sum: String, total: String },
    #[error("piece masses sum to {sum}, short of the finite total measure {total}")]
    MassShortOfTotal { sum: String, total: String },
    #[error("undefined extended-real arithmetic: {0}")]
    UndefinedArithmetic(&'static str),
    #[error("evaluation point s = {s} outside [0, {total}]")]
    SOutOfRange { s: String, total: String },
    #[error("hinge level u = {0} < 0 diverges on a space of infinite measure")]
    DivergentHinge(String),
    #[error("total measures differ: {0} vs {1}")]
    MeasureMismatch(String, String),
    #[error("criterion requires nonnegative functions")]
    SignednessViolation,
    #[error("test-function family is empty")]
    EmptyFamily,
    #[error("invalid test-function parameter: {0}")]
    InvalidFamilyParameter(String),
    #[error("criteria disagree (implementation bug): {0}")]
    InternalInconsistency(String),
    #[error("negative matrix entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("function is not aligned with the partition: {0}")]
    PartitionMisaligned(String),
    #[error("operator is not stochastic enough: need at least {required}, found {found}")]
    NotStochastic { required: &'static str, found: &'static str },
    #[error("tail atoms must have positive mass (infimum of atom masses is zero)")]
    TailMassInfimumZero,
    #[error("operation needs a partition of equal atom masses")]
    UnequalMassesUnsupported,
    #[error("no witness exists: the source does not majorize the target")]
    NotMajorized,
    #[error("delta = {delta} outside [0, {total}]")]
    DeltaOutOfRange { delta: String, total: String },
    #[error("parse error at line {line}, column {column} near `{token}`: {message}")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
}
