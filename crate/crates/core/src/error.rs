//! Error type shared across the engine.

use thiserror::Error;

/// Errors produced by data ingestion, truth-table construction,
/// minimization, and model fitting.
///
/// "No result" from minimization is not an error; it is modeled as
/// `Option::None` in [`crate::minimize::solve`].
#[derive(Debug, Error)]
pub enum QcaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("outcome column {0:?} not found in header")]
    MissingOutcomeColumn(String),

    #[error("id column {0:?} not found in header")]
    MissingIdColumn(String),

    #[error("column {0:?} named in a coding rule not found in header")]
    MissingRuleColumn(String),

    #[error("non-numeric cell at row {row}, column {column:?}: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("missing value at row {row}, column {column:?}")]
    MissingValue { row: usize, column: String },

    #[error("non-binary outcome: value {value} at row {row}")]
    NonBinaryOutcome { row: usize, value: f64 },

    #[error("non-binary value {value} at row {row}, column {column:?} (supply a coding rule for this column)")]
    NonBinaryColumn {
        row: usize,
        column: String,
        value: f64,
    },

    #[error("duplicate condition name {0:?}")]
    DuplicateConditionName(String),

    #[error("condition name {0:?} collides with the outcome label")]
    ConditionNamedAsOutcome(String),

    #[error("data set has no cases")]
    EmptyData,

    #[error("data set has no causal conditions")]
    NoConditions,

    #[error("empty numeric vector")]
    EmptyVector,

    #[error("non-finite value {value} at position {index}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("consistency threshold {0} outside [0, 1]")]
    ConsistencyThresholdOutOfRange(f64),

    #[error("configurational N threshold must be at least 1")]
    ConfNThresholdZero,

    #[error("at most 26 conditions supported, got {0}")]
    TooManyConditions(usize),

    #[error("empty range for {0}")]
    EmptyRange(&'static str),

    #[error("probability {value} for {what} outside [0, 1]")]
    ProbabilityOutOfRange { what: &'static str, value: f64 },

    #[error("coverage undefined: no outcome-positive cases")]
    CoverageUndefined,

    #[error("internal error: pass row {0:#b} covered by no prime implicant")]
    UncoveredPassRow(u32),

    #[error("term {0:?} not present in the predictor record")]
    MissingTerm(String),

    #[error("unknown predictor name {0:?}")]
    UnknownPredictor(String),

    #[error("design matrix has no rows")]
    EmptyDesign,

    #[error("response length {y_len} does not match design rows {rows}")]
    ResponseLengthMismatch { y_len: usize, rows: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, QcaError>;
