use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// The angular separation has no closed form in the supported fields.
    #[error("unsupported exact angle: {turns} turns")]
    UnsupportedExactAngle { turns: String },

    #[error("cannot compare Cartesian and symbolic points {i} and {j} exactly")]
    MixedRepresentation { i: usize, j: usize },

    /// A predicate failed on a specific pair of points.
    #[error("points {i} and {j}: {source}")]
    AtPair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension must be at least 4, got {0}")]
    Dimension(usize),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("spread too large: within-part chords would reach the cross-part distance")]
    SpreadTooLarge,

    #[error("no fresh exact position available: {0}")]
    PlacementExhausted(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_pair(self, i: usize, j: usize) -> Error {
        match self {
            e @ Error::AtPair { .. } => e,
            Error::MixedRepresentation { .. } => Error::MixedRepresentation { i, j },
            other => Error::AtPair {
                i,
                j,
                source: Box::new(other),
            },
        }
    }

    /// Index of the first point involved, when the error concerns a pair.
    pub fn point_index(&self) -> Option<usize> {
        match self {
            Error::AtPair { i, .. } | Error::MixedRepresentation { i, .. } => Some(*i),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
