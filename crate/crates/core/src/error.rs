use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty support: a distribution needs at least one outcome")]
    EmptySupport,

    #[error("weight {index} is {value}; every prior weight must be strictly positive")]
    ZeroOrNegativeWeight { index: usize, value: String },

    #[error("weights sum to {sum}, outside the stochasticity tolerance")]
    NotNormalized { sum: String },

    #[error("non-finite value at {field}")]
    NonFinite { field: String },

    #[error("channel entry ({row}, {col}) = {value} is outside [0, 1]")]
    InvalidEntry { row: usize, col: usize, value: String },

    #[error("channel row {row} sums to {sum}, outside the stochasticity tolerance")]
    RowNotStochastic { row: usize, sum: String },

    #[error("ragged rows: row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("outcome {y} has zero probability")]
    UndefinedOutcome { y: usize },

    #[error("no guess has finite prior expected cost")]
    AllInfinitePrior,

    #[error("negative cost at ({row}, {col})")]
    NegativeCost { row: usize, col: usize },

    #[error("cost function is identically zero and cannot be normalized")]
    NormalizationDegenerate,

    #[error("cost function has infinite entries; finite-range costs are required here")]
    InfiniteCost,

    #[error("k = {k} does not make the aggregated symbol the most likely one")]
    KTooSmall { k: usize },

    #[error("pointwise maximal cost is infinite at outcome {y}; no finite witness exists")]
    InfiniteLeakage { y: usize },

    #[error("p_min = {0} is outside (0, 1]")]
    InvalidPmin(f64),

    #[error("privacy parameter {0} must be non-negative")]
    InvalidEpsilon(f64),

    #[error("privacy parameter {eps_u} is outside the high-privacy regime (bound {bound})")]
    OutsideHighPrivacy { eps_u: f64, bound: f64 },

    #[error("alphabet size {0} is too small")]
    InvalidAlphabet(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("cumulant generating function unavailable for this input law")]
    CgfUnavailable,

    #[error("input law does not provide {0}")]
    LawCapability(&'static str),

    #[error("numerical integration failed: {0}")]
    QuadratureFailure(String),

    #[error("root search failed: {0}")]
    SearchFailure(String),

    #[error("work budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
