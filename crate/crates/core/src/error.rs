use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("bins too fine: n0 = {n0} exceeds n/2 for (n = {n}, h1 = {h1}, h2 = {h2})")]
    BinsTooFine {
        n: usize,
        h1: f64,
        h2: f64,
        n0: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "bandwidth too small: {found} kernel-weighted design points at t = {t}, need {needed}"
    )]
    BandwidthTooSmall { t: f64, found: usize, needed: usize },

    #[error("degenerate normalisation: mean of local estimates is {denom}")]
    DegenerateNormalisation { denom: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("no feasible tuning point in grid")]
    NoFeasibleTuningPoint,

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code: 2 configuration, 3 data format, 4 numerical degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Config(_)
            | Error::BinsTooFine { .. }
            | Error::Domain(_)
            | Error::BandwidthTooSmall { .. }
            | Error::UnsupportedModel(_)
            | Error::NoFeasibleTuningPoint
            | Error::Io { .. } => 2,
            Error::Parse { .. } | Error::Format(_) | Error::Csv(_) => 3,
            Error::DegenerateNormalisation { .. } => 4,
            Error::Json(_) | Error::Internal(_) => 1,
        }
    }
}
