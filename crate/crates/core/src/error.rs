use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // scale model
    #[error("scale: unknown Likert label {0:?}")]
    UnknownLabel(String),
    #[error("scale: expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("scale: unknown item {0}")]
    UnknownItem(usize),
    #[error("scale: dataset has no respondents")]
    EmptyDataset,
    #[error("scale: invalid definition: {0}")]
    InvalidScale(String),
    #[error("scale: code {code} at respondent {row}, item {item} is not a valid Likert code")]
    InvalidCode { row: usize, item: usize, code: i64 },

    // ingestion
    #[error("ingestion: parse error at row {row}, column {column:?}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("ingestion: missing column {0:?}")]
    MissingColumn(String),
    #[error("ingestion: missing value at row {row}, column {column:?}")]
    MissingValue { row: usize, column: String },
    #[error("ingestion: duplicate respondent {0:?}")]
    DuplicateRespondent(String),
    #[error("ingestion: cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    // content validity
    #[error("content-validity: expert panel is empty")]
    EmptyPanel,
    #[error("content-validity: no items to summarize")]
    EmptyScale,

    // reliability
    #[error("reliability: {0} has zero variance")]
    ConstantInput(&'static str),
    #[error("reliability: length mismatch ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("reliability: need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("reliability: total score variance is zero")]
    ZeroTotalVariance,
    #[error("reliability: degenerate data: {0}")]
    DegenerateData(&'static str),

    // construct validity
    #[error("construct-validity: item {0} has zero variance")]
    ConstantColumn(usize),
    #[error("construct-validity: matrix is not symmetric")]
    NonSymmetric,
    #[error("construct-validity: matrix has non-finite entries")]
    NonFiniteEntry,
    #[error("construct-validity: covariance matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("construct-validity: model is not identified: {0}")]
    UnidentifiedModel(String),

    // discriminant validity
    #[error("discriminant-validity: class {0:?} has fewer than 2 members")]
    ClassTooSmall(String),
    #[error("discriminant-validity: pooled covariance is singular")]
    SingularCovariance,
    #[error("discriminant-validity: both groups have zero variance")]
    DegenerateGroup,
    #[error("discriminant-validity: expected exactly two classes, got {0}")]
    NotBinary(usize),
    #[error("discriminant-validity: trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("discriminant-validity: invalid trial config: {0}")]
    BadConfig(String),

    // scoring and benchmark
    #[error("scoring: dimension {0:?} has no items")]
    EmptyDimension(String),
    #[error("scoring: weights must be non-negative and sum to 1")]
    BadWeights,
    #[error("benchmark: store is empty")]
    EmptyBenchmark,
    #[error("benchmark: system {0:?} already present")]
    DuplicateSystem(String),
    #[error("benchmark: version mismatch: {0}")]
    VersionMismatch(String),
    #[error("benchmark: malformed store: {0}")]
    Json(#[from] serde_json::Error),

    // simulation
    #[error("simulation: bad generator spec: {0}")]
    BadSpec(String),

    // reporting
    #[error("report: section {0:?} is missing")]
    MissingSection(&'static str),
    #[error("report: cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report: invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by bad inputs (files, schemas, configuration)
    /// rather than by a failing analysis.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnknownLabel(_)
                | Error::DimensionMismatch { .. }
                | Error::UnknownItem(_)
                | Error::EmptyDataset
                | Error::InvalidScale(_)
                | Error::InvalidCode { .. }
                | Error::Parse { .. }
                | Error::MissingColumn(_)
                | Error::MissingValue { .. }
                | Error::DuplicateRespondent(_)
                | Error::Io { .. }
                | Error::Json(_)
                | Error::VersionMismatch(_)
                | Error::DuplicateSystem(_)
                | Error::Config(_)
        )
    }
}
