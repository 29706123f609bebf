use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radicand mismatch: sqrt({0}) vs sqrt({1})")]
    RadicandMismatch(u64, u64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not expansive (eigenvalue modulus {0:.6} <= 1)")]
    NotExpansive(f64),
    #[error("missing coset part for representative {0:?}")]
    MissingCoset(Vec<i64>),
    #[error("coset index {0} out of range 1..{1}")]
    CosetIndexOutOfRange(usize, usize),
    #[error("filter is not interpolatory for this dilation")]
    NotInterpolatory,
    #[error("filter is not normalized (sum of coefficients must be 1)")]
    NotNormalized,
    #[error("dilation matrix is not compatible with the symmetry group")]
    NotCompatible,
    #[error("no group element E with I - E invertible")]
    ConditionNotMet,
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("filter has {found} vanishing moments, {required} required")]
    InsufficientVanishingMoments { required: u32, found: u32 },
    #[error("no solution of the difference-ideal system within the enlarged support box")]
    NoSolutionInBox,
    #[error("order split {n1}+{n2} does not match |alpha| = {total}")]
    BadOrderSplit { n1: u32, n2: u32, total: u32 },
    #[error("requested orders {n1}+{n2} exceed min sum rule order {available}")]
    OrderBudgetExceeded { n1: u32, n2: u32, available: u32 },
    #[error("filter is not Hermitian")]
    NotHermitian,
    #[error("sum rule order {sr} is below 2m = {}", 2 * .m)]
    OddSumRuleOrder { sr: u32, m: u32 },
    #[error("sum rule order is zero")]
    SumRuleZero,
    #[error("grid level mismatch: {0}")]
    LevelMismatch(String),
    #[error("constraints are infeasible")]
    Infeasible,
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("expected {expected} parameters, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("constructed bank failed exact verification at entry ({0}, {1})")]
    VerificationFailed(usize, usize),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
