use std::path::PathBuf;

use thiserror::Error;

/// A single invariant violation found while validating a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyDataset,
    /// Point at `index` has `found` coordinates while the dataset uses `expected`.
    DimensionMismatch { index: usize, expected: usize, found: usize },
    /// Coordinate `coord` of point `index` is NaN or infinite (`coord == None` means the label).
    NonFiniteValue { index: usize, coord: Option<usize> },
    NonBinaryLabel { index: usize, value: f64 },
    /// `points.len() != labels.len()`.
    LengthMismatch { points: usize, labels: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EmptyDataset => write!(f, "dataset is empty"),
            Violation::DimensionMismatch { index, expected, found } => write!(
                f,
                "point {index} has dimension {found}, expected {expected}"
            ),
            Violation::NonFiniteValue { index, coord: Some(c) } => {
                write!(f, "point {index} coordinate {c} is not finite")
            }
            Violation::NonFiniteValue { index, coord: None } => {
                write!(f, "label {index} is not finite")
            }
            Violation::NonBinaryLabel { index, value } => {
                write!(f, "label {index} = {value} is not in {{0, 1}}")
            }
            Violation::LengthMismatch { points, labels } => {
                write!(f, "{points} points but {labels} labels")
            }
        }
    }
}

/// Every violation found in a dataset, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub violations: Vec<Violation>,
}

impl std::fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(8) {
            write!(f, "; {v}")?;
        }
        if self.violations.len() > 8 {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(ErrorReport),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value: {0}")]
    NonFiniteValue(String),

    #[error("label {value} at row {row} is not binary")]
    NonBinaryLabel { row: usize, value: f64 },

    #[error("split with train fraction {fraction} of {n} points leaves an empty side")]
    DegenerateSplit { n: usize, fraction: f64 },

    #[error("k = {k} needs {} neighbors but only {n} training points exist", k + 1)]
    KTooLarge { k: usize, n: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("query set is empty")]
    EmptyQuerySet,

    #[error("operation requires a {expected} model")]
    TaskMismatch { expected: &'static str },

    #[error("models differ in weight scheme or k")]
    SchemeMismatch,

    #[error("k grid is empty")]
    EmptyGrid,

    #[error("gamma = {gamma} is outside the theory regime for d = {d} (requires gamma < {bound})")]
    OutOfRegime { d: usize, gamma: f64, bound: f64 },

    #[error("invalid experiment config: {0}")]
    ConfigInvalid(String),

    #[error("csv parse error at row {row}, column {col}: {msg}")]
    CsvParse { row: usize, col: usize, msg: String },

    #[error("study produced no rows")]
    EmptyResult,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
