use thiserror::Error;

/// Errors raised by the combinatorial engine.
///
/// Structural problems found by the `validate_*` functions are returned as
/// data (lists of violations); this enum covers failed operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("invalid branched graph: {0}")]
    InvalidGraph(String),

    #[error("invalid cellular map: {0}")]
    InvalidMap(String),

    #[error("maps are not composable: {0}")]
    NotComposable(String),

    #[error("malformed germ: {0}")]
    MalformedGerm(String),

    #[error("telescoping indices must be strictly increasing")]
    NonMonotoneIndices,

    #[error("level {requested} is beyond the available depth {available}")]
    DepthOutOfRange { requested: usize, available: usize },

    #[error("bond {level} is not surjective: {detail}")]
    NotSurjective { level: usize, detail: String },

    #[error("not locally trivial at level {level}: {detail}")]
    NotLocallyTrivial { level: usize, detail: String },

    #[error("operation requires a stationary system")]
    NotStationary,

    #[error("incoherent thread at level {level}")]
    IncoherentThread { level: usize },

    #[error("illegal word `{0}`")]
    IllegalWord(String),

    #[error("window of radius {radius} around index {mark} exceeds word of length {len}")]
    WindowExceedsWord { radius: usize, mark: usize, len: usize },

    #[error("empty language: {0}")]
    EmptyLanguage(String),

    #[error("clopen sets are defined over different languages")]
    OracleMismatch,

    #[error("radius {requested} is smaller than the current radius {current}")]
    RadiusTooSmall { requested: usize, current: usize },

    #[error("invalid covering: {0}")]
    InvalidCovering(String),

    #[error("covering is not regular: deck group of order {order} on a fiber of size {degree}")]
    NotRegular { order: usize, degree: usize },

    #[error("elements belong to different towers or have different depths")]
    ElementMismatch,

    #[error("metric needs depth at least 2, got {0}")]
    DepthTooSmall(usize),

    #[error("path is not closed at the base point")]
    NotClosed,

    #[error("not an edge path: {0}")]
    NotAPath(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
