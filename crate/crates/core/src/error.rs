use thiserror::Error;

use crate::forms::ConditionReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),

    #[error("degenerate splitting (condition number {condition:.3e})")]
    DegenerateSplit { condition: f64 },

    #[error("alpha metric undefined: {0}")]
    AlphaMetricUndefined(String),

    #[error("metric singular")]
    MetricSingular,

    #[error("shift below the essential lower edge a: u = {u}, a = {a}")]
    ShiftBelowEdge { u: f64, a: f64 },

    #[error("shifted block too ill-conditioned at u = {u} (condition estimate {condition:.3e})")]
    IllConditionedShift { u: f64, condition: f64 },

    #[error("index k = {k} out of range 1..={max}")]
    IndexOutOfRange { k: usize, max: usize },

    #[error("eigenvalue at or above search ceiling {ceiling}")]
    AboveCeiling { ceiling: f64 },

    #[error("brute-force oracle limited to n_plus <= 3 and k <= 2 (got n_plus = {n_plus}, k = {k})")]
    DimensionLimit { n_plus: usize, k: usize },

    #[error("invalid quantum number kappa = 0")]
    InvalidKappa,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("overcritical channel: nu = {nu} >= |kappa| = {kappa}")]
    Overcritical { nu: f64, kappa: i32 },

    #[error("coupling nu = {nu} outside the admissible regime: {reason}")]
    RegimeViolation { nu: f64, reason: String },

    #[error("ambiguous spectral split: free eigenvalue {value:.3e} too close to 0")]
    AmbiguousSplit { value: f64 },

    #[error("form conditions failed")]
    FormCheckFailed(Box<ConditionReport>),

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
