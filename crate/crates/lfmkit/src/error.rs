//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by series algebra, ingestion, fitting, and projection.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series '{label}' must contain at least one value")]
    EmptySeries { label: String },

    #[error("series '{label}' has a non-finite value in year {year}")]
    NonFinite { label: String, year: i32 },

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("non-positive level {value} in year {year} of '{label}': change rate undefined")]
    NonPositiveLevel {
        label: String,
        year: i32,
        value: f64,
    },

    #[error("window start {first} is after end {last}")]
    InvalidWindow { first: i32, last: i32 },

    #[error("requested window {first}:{last} is outside the available span {have_first}:{have_last}")]
    WindowOutOfRange {
        first: i32,
        last: i32,
        have_first: i32,
        have_last: i32,
    },

    #[error("year {year} is outside the available span {have_first}:{have_last}")]
    YearOutOfRange {
        year: i32,
        have_first: i32,
        have_last: i32,
    },

    #[error("series '{a}' ({a_first}:{a_last}) and '{b}' ({b_first}:{b_last}) share no years")]
    NoOverlap {
        a: String,
        a_first: i32,
        a_last: i32,
        b: String,
        b_first: i32,
        b_last: i32,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate year {year}")]
    DuplicateYear { line: usize, year: i32 },

    #[error("years are not contiguous: missing {}", format_years(.missing))]
    MissingYears { missing: Vec<i32> },

    #[error("no dataset registered under key '{key}'")]
    UnknownKey { key: String },

    #[error("dataset '{key}' is already registered; pass overwrite to replace it")]
    KeyConflict { key: String },

    #[error("validation rejected '{label}': {message}")]
    ValidationFailed { label: String, message: String },

    #[error("regressor '{label}' has zero variance over the fit window")]
    DegenerateRegressor { label: String },

    #[error("specification error: {0}")]
    Specification(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("participation rate {rate} is outside (0, 1]")]
    ParticipationRange { rate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_years(years: &[i32]) -> String {
    years
        .iter()
        .map(|y| y.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
