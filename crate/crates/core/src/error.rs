use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix columns are linearly dependent")]
    RankDeficient,

    #[error("vector is not of unit length (|u| = {0})")]
    NotUnitVector(f64),

    #[error("linear map is singular")]
    SingularTransform,

    #[error("origin is not in the interior of the body")]
    OriginNotInterior,

    #[error("operation not supported for {0} bodies")]
    UnsupportedRepresentation(&'static str),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("degenerate input: intrinsic dimension {found} < {expected}")]
    DegenerateInput { expected: usize, found: usize },

    #[error("bounding box is empty")]
    EmptyBox,

    #[error("invalid dimensions: {0}")]
    BadDims(String),

    #[error("vector lies in the span of the subspace")]
    DependentVector,

    #[error("zero vector")]
    ZeroVector,

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn dims(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }

    /// Whether this error signals a numerical breakdown (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::DegenerateInput { .. } | Error::RankDeficient
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
