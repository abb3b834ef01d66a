use thiserror::Error;

pub type Result<T, E = SdcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SdcError {
    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("column `{0}` is not declared in the schema")]
    UnexpectedColumn(String),

    #[error("row {row}: value of `{attribute}` is outside its declared domain")]
    DomainViolation { row: usize, attribute: String },

    #[error("row {row}: missing value for `{attribute}`")]
    MissingValue { row: usize, attribute: String },

    #[error("malformed csv (line {line}): {message}")]
    MalformedCsv { line: u64, message: String },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("value `{value}` is not a leaf of the `{attribute}` hierarchy")]
    UnknownValue { attribute: String, value: String },

    #[error("level {level} out of range (hierarchy height {height})")]
    LevelOutOfRange { level: usize, height: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error("no generalization hierarchy for quasi-identifier `{0}`")]
    HierarchyMissing(String),

    #[error("search space of {states:.3e} states exceeds the limit of {limit}")]
    SearchSpaceTooLarge { states: f64, limit: u64 },

    #[error("{n} rows cannot form groups of size {k}")]
    TooFewRows { n: usize, k: usize },

    #[error("misaligned inputs: {0}")]
    Misaligned(String),

    #[error("group {group} has {size} rows, fewer than k = {k}")]
    GroupTooSmall { group: usize, size: usize, k: usize },

    #[error("release and external table share no quasi-identifier")]
    NoSharedQIs,

    #[error("empty class")]
    EmptyClass,

    #[error("distributions are defined over different supports")]
    SupportMismatch,

    #[error("multiplicative closeness factor must be >= 1, got {0}")]
    InvalidT(f64),

    #[error("infeasible: {constraint} cannot be met even by a single class")]
    Infeasible { constraint: String },

    #[error("attribute `{0}` is not numeric")]
    NonNumeric(String),

    #[error("attribute `{0}` has an unbounded domain")]
    UnboundedDomain(String),

    #[error("epsilon must be > 0, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("alpha must be > 1, got {0}")]
    InvalidAlpha(f64),

    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("rho must be > 0, got {0}")]
    InvalidRho(f64),

    #[error("tables are not neighbors under the {0} model")]
    NotNeighbors(String),

    #[error("release carries no partition")]
    MissingPartition,

    #[error("release was produced by `{0}`, not by minimal generalization")]
    NotMinimalMechanism(String),

    #[error("{path}: {error}")]
    InFile { path: String, error: Box<SdcError> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
