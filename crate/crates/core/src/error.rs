use std::fmt;

use crate::report::AxiomReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where in an input text a parse error occurred (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.column {
            Some(col) => write!(f, "line {}, column {}", self.line, col),
            None => write!(f, "line {}", self.line),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("dense storage of {points} points exceeds the limit of {limit}")]
    TooLarge { points: u128, limit: usize },

    #[error("resolution and dimension must both be at least 1 (got M={resolution}, L={dim})")]
    EmptyShape { resolution: usize, dim: usize },

    #[error("index {index:?} is outside the grid {{0..={resolution}}}^{dim}")]
    IndexOutOfRange {
        index: Vec<usize>,
        resolution: usize,
        dim: usize,
    },

    #[error("box lower corner {lower:?} is not below upper corner {upper:?}")]
    InvertedBox { lower: Vec<usize>, upper: Vec<usize> },

    #[error("non-finite value {value} at position {position}")]
    NonFinite { position: usize, value: f64 },

    #[error("axioms violated: {0}")]
    Axioms(AxiomReport),

    #[error("array is not a permutation array")]
    NotPermutationArray,

    #[error("column {column} of the rank matrix is not a permutation of 1..={members}")]
    NotPermutation { column: usize, members: usize },

    #[error("tie in column {column}: value {value} occurs more than once")]
    Tie { column: usize, value: f64 },

    #[error("values of grid {axis} are not strictly increasing")]
    NotIncreasing { axis: usize },

    #[error("domain {axis} must be strictly increasing within 0..={resolution} and contain both 0 and {resolution}")]
    BadDomain { axis: usize, resolution: usize },

    #[error("block {block:?} has volume {count} (in units of 1/M), which is not a nonnegative integer")]
    ExtensionInfeasible { block: Vec<usize>, count: f64 },

    #[error("copula is not irreducible")]
    NotIrreducible,

    #[error("resolution mismatch: expected M={expected}, found M={found}")]
    ResolutionMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mass {mass} is not a nonnegative multiple of 1/{resolution}")]
    NotRepresentable { mass: f64, resolution: usize },

    #[error("masses sum to {total}/{resolution}, expected 1")]
    MassTotal { total: usize, resolution: usize },

    #[error("duplicate support point {point:?}")]
    DuplicatePoint { point: Vec<f64> },

    #[error("invalid step cdf: {0}")]
    BadStepCdf(String),

    #[error("degenerate predictive margin: {0}")]
    DegenerateMargin(String),

    #[error("samples for margin {margin} are not sorted")]
    UnsortedSamples { margin: usize },

    #[error("duplicate margin id {0}")]
    DuplicateMargin(String),

    #[error("margins do not match the ensemble: {0}")]
    MarginMismatch(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: Location, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: Location { line, column },
            message: message.into(),
        }
    }

    /// True for errors caused by unreadable or malformed input, as opposed
    /// to well-formed input that fails a mathematical check.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_))
    }
}
