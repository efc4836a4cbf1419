use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("lp metric requires p > 0, got {0}")]
    InvalidLpExponent(f64),
    #[error("arc-length metric requires unit-norm points; row {row} has norm {norm}")]
    NonUnitNorm { row: usize, norm: f64 },
    #[error("hamming metric requires 0/1 entries; row {row}, column {col} is {value}")]
    NonBinaryEntry { row: usize, col: usize, value: f64 },
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("k = {k} out of range for n = {n}")]
    InvalidNeighborCount { k: usize, n: usize },
    #[error("zero-distance neighbor pair ({i}, {j}); deduplicate points before building a knn graph")]
    ZeroDistanceNeighbors { i: usize, j: usize },
    #[error("knn graph is disconnected; component sizes: {0:?}")]
    DisconnectedGraph(Vec<usize>),
    #[error("invalid probability vector: {0}")]
    InvalidProbabilityVector(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("edge lengths must be positive, got {0}")]
    NonPositiveEdgeLength(f64),
    #[error("rail depth oracle requires strictly positive norms, got {0}")]
    NonPositiveNorm(f64),
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("covariance matrix is singular even after regularization")]
    SingularCovariance,
    #[error("classifier was fitted on {expected} features, got {got}")]
    FeatureDimensionMismatch { expected: usize, got: usize },
    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown metric descriptor {0:?}")]
    UnknownMetric(String),
    #[error("unknown label column {0:?}")]
    UnknownLabelColumn(String),
    #[error("{path}: line {line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
