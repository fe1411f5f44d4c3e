use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("points {0} and {1} coincide (separation {2:e} is at or below the coincidence threshold)")]
    CoincidentPoints(usize, usize, f64),

    #[error("base points {0} and {1} coincide after projection")]
    CoincidentBasePoints(usize, usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, found {0}")]
    BadDimension(usize),

    #[error("at least {needed} points are required, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("no directions given")]
    EmptyInput,

    #[error("invalid tolerance: {0}")]
    BadTolerance(String),

    #[error("not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),

    #[error("duplicate point at index {0} (first seen at index {1})")]
    DuplicatePoint(usize, usize),

    #[error("not a graph over the requested direction: points {0} and {1} are aligned with it")]
    NotAGraph(usize, usize),

    #[error("x values must be strictly increasing (violated at index {0})")]
    UnsortedDomain(usize),

    #[error("length mismatch: {0} x values, {1} y values")]
    LengthMismatch(usize, usize),

    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),

    #[error("bad generator spec: {field}: {message}")]
    BadSpec { field: String, message: String },

    #[error("input error at row {row}: {message}")]
    Input { row: usize, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the caller's input rather than by the computation.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::NotAGraph(..))
    }

    pub(crate) fn bad_spec(field: &str, message: impl Into<String>) -> Self {
        Error::BadSpec {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
