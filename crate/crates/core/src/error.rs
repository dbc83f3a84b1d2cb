//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid membership function: {0}")]
    InvalidMembership(String),

    #[error("degenerate domain: max ({max}) must exceed min ({min})")]
    DegenerateDomain { min: f64, max: f64 },

    #[error("rule base of {rule_count} rules exceeds the cap of {cap}")]
    RuleCapExceeded { rule_count: usize, cap: usize },

    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    CsvValue { line: u64, message: String },

    #[error("series `{0}` not found in the table")]
    MissingSeries(String),

    #[error("series `{series}` has no value for year {year} (gap policy is `error`)")]
    SeriesGap { series: String, year: i32 },

    #[error("aggregation produced an empty table: {0}")]
    EmptyTable(String),

    #[error("insufficient years: need at least {needed}, have {available}")]
    InsufficientYears { needed: usize, available: usize },

    #[error("degenerate split: ratio {ratio} over {rows} rows leaves an empty train or test set")]
    DegenerateSplit { rows: usize, ratio: f64 },

    #[error("training aborted at epoch {epoch}: {message}")]
    TrainingDiverged { epoch: usize, message: String },

    #[error(
        "model was trained in exogenous mode; recursive forecasting needs future input values \
         that are unavailable. Retrain with feature_mode = autoregressive"
    )]
    ExogenousForecast,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedModelVersion { found: u32, supported: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
