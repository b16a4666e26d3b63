use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("torus must have 1 or 2 dimensions, got {0}")]
    Rank(usize),

    #[error("torus dimension {index} has size {size}; every dimension needs at least 3 cells")]
    DimTooSmall { index: usize, size: usize },

    #[error("torus of dims {0:?} has too many cells")]
    TooManyCells(Vec<usize>),

    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state has {got} values but dims {dims:?} require {expected}")]
    ValueCount {
        dims: Vec<usize>,
        expected: usize,
        got: usize,
    },

    #[error("total mass of state exceeds {}", i64::MAX)]
    MassOverflow,

    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),

    #[error("primitive model needs an even torus size of at least 4, got {0}")]
    PrimitiveSize(usize),

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
