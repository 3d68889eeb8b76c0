use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation at t = {t} is at or beyond the singularity (a - k t = {reciprocal:e})")]
    NearSingularity { t: f64, reciprocal: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("insufficient data: need at least {needed} observations, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("series is not hyperbolic: reciprocal slope {slope:e} is not negative")]
    NotHyperbolic { slope: f64 },

    #[error("no observation at year {0}")]
    MissingObservation(i32),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate year {year} at row {row}")]
    DuplicateYear { year: i32, row: usize },

    #[error("duplicate entity {0:?}")]
    DuplicateEntity(String),

    #[error("unknown entity {0:?}")]
    UnknownEntity(String),

    #[error("region {0:?} has no year common to all members")]
    EmptyResult(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("preset file: {0}")]
    Preset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
