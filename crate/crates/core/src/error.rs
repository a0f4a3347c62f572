use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("n must be at least 1")]
    InvalidN,
    #[error("no simple 4-regular dual graph exists on {0} vertices")]
    NoSimpleGraph(usize),
    #[error("rejection sampler exceeded {0} retries")]
    RetryLimitExceeded(usize),
    #[error("exhaustive enumeration only supported for n <= 2, got {0}")]
    TooLarge(usize),
    #[error("face ({tet}, {face}) is out of range for this instance")]
    UnknownFace { tet: usize, face: usize },
    #[error("boundary map composition is nonzero: sign convention bug")]
    OrientationInconsistency,
    #[error("odd Euler characteristic {0} on a closed orientable surface component")]
    OddEulerCharacteristic(i64),
    #[error("matrix has {0} nonzeros, exceeding the configured cap of {1}")]
    SizeLimitExceeded(usize, usize),
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("graph too small for a spectral gap")]
    GraphTooSmall,
    #[error("need stats over at least 3 distinct n spanning a decade")]
    InsufficientData,
    #[error("conservation check failed: {0}")]
    ConservationViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
