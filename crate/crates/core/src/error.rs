use std::path::PathBuf;

use crate::series::Year;
use crate::units::Unit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series '{label}': {reason}")]
    InvalidSeries { label: String, reason: String },

    #[error("duplicate year {year}")]
    DuplicateYear { year: Year },

    #[error("invalid year range {start}..={end}")]
    InvalidRange { start: Year, end: Year },

    #[error("series '{label}' has no anchor at year {year}")]
    MissingAnchor { label: String, year: Year },

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: String, value: f64 },

    #[error("{what} must be non-negative, got {value}")]
    Negative { what: String, value: f64 },

    #[error("{what} = {value} is outside {min}..={max}")]
    OutOfBounds {
        what: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("series '{label}' has a gap in its year grid between {after} and {next}")]
    Gap { label: String, after: Year, next: Year },

    #[error("series '{label}' does not cover year {year}")]
    NotCovered { label: String, year: Year },

    #[error("zero denominator in '{label}' at year {year}")]
    ZeroDenominator { label: String, year: Year },

    #[error("unit mismatch: {left} vs {right}")]
    UnitMismatch { left: Unit, right: Unit },

    #[error("unknown unit tag '{0}'")]
    UnknownUnit(String),

    #[error("need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("no overlapping years between '{left}' and '{right}'")]
    NoOverlap { left: String, right: String },

    #[error("x values have zero variance")]
    ZeroVariance,

    #[error("{0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: missing column '{column}'")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error means an input file could not be found.
    pub fn is_missing_file(&self) -> bool {
        match self {
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            Error::Csv { source, .. } => matches!(
                source.kind(),
                csv::ErrorKind::Io(e) if e.kind() == std::io::ErrorKind::NotFound
            ),
            _ => false,
        }
    }
}
