use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("branching factor must be 2 or 3, got {0}")]
    BadFactor(usize),
    #[error("bad axis coordinates on axis {axis}: {reason}")]
    BadAxisCoordinates { axis: usize, reason: String },
    #[error("expected {expected} trees for the root layout, got {found}")]
    TreeCountMismatch { expected: usize, found: usize },
    #[error("tree {tree}: descriptor length mismatch ({reason})")]
    DescriptorLengthMismatch { tree: usize, reason: String },
    #[error("invalid character {found:?} in bit string")]
    InvalidBitChar { found: char },
    #[error("tree {tree}: depth {depth} exceeds the supported maximum {max}")]
    DepthTooLarge { tree: usize, depth: usize, max: usize },
    #[error("field {name:?} has {found} values, expected {expected}")]
    FieldLengthMismatch { name: String, expected: usize, found: usize },
    #[error("mask has {found} bits, expected {expected}")]
    MaskLengthMismatch { expected: usize, found: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("cell is not refined")]
    NotRefined,
    #[error("operation requires a {expected}-dimensional grid, got {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("query has dimension {found}, grid has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-positive argument: {0}")]
    NonPositiveArgument(&'static str),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown canonical grid {0:?}")]
    UnknownCanonicalGrid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
