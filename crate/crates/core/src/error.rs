use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("fan is not complete")]
    NotComplete,
    #[error("fan is not smooth")]
    NotSmooth,
    #[error("class group has torsion (invariant factors {0:?})")]
    TorsionClassGroup(Vec<String>),
    #[error("invalid deg matrix: {0}")]
    InvalidDegMatrix(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("class {0} has no torus-invariant lift")]
    NoLift(String),
    #[error("duplicate class {0} in collection")]
    DuplicateClass(String),
    #[error("nonzero homomorphisms in both directions between vertices {0} and {1}")]
    CyclicHoms(usize, usize),
    #[error("arrow {0}: label does not have the multidegree of target minus source")]
    BadLabelDegree(usize),
    #[error("arrow {0}: source does not precede target")]
    BadOrientation(usize),
    #[error("non-vanishing region for rays {0:?} is unbounded")]
    UnboundedRegion(Vec<usize>),
    #[error("unknown database key ({0}, {1})")]
    UnknownKey(usize, usize),
    #[error("no collection stored for ({0}, {1})")]
    NoCollection(usize, usize),
    #[error("no contraction from ({0}, {1}) to ({2}, {3})")]
    NoSuchEdge(usize, usize, usize, usize),
    #[error("contraction square does not commute: {0}")]
    NonCommuting(String),
    #[error("chain does not start at the quiver's variety")]
    ChainMismatch,
    #[error("database: {0}")]
    Database(String),
    #[error("json: {0}")]
    Json(String),
    #[error("integer {0} does not fit the serialized format")]
    Overflow(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
