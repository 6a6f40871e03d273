use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("vertex count mismatch: {left} vs {right}")]
    VertexCountMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("moduli {a} and {b} are not coprime")]
    NotCoprime { a: u32, b: u32 },

    #[error("invalid moduli set: {0}")]
    InvalidModuli(String),

    #[error("value {value} out of range (must be < {bound})")]
    OutOfRange { value: u64, bound: u64 },

    #[error("message needs {needed} bits but the document carries {available}")]
    CapacityExceeded { needed: u64, available: u64 },

    #[error("character {0:?} has no codebook entry")]
    UnknownCharacter(char),

    #[error("document too small: no complete block could be formed")]
    DocumentTooSmall,

    #[error("block {block} could not be decoded")]
    PartialDecode { block: usize },

    #[error("corrupt frame: {0}")]
    CorruptFrame(String),

    #[error("key mismatch: {0}")]
    KeyMismatch(String),

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("codebook construction did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("segment {segment} cannot hold {needed} bits (capacity {available})")]
    SegmentCapacity {
        segment: usize,
        needed: u64,
        available: u64,
    },

    #[error("signature provider: {0}")]
    Provider(String),

    #[error("unknown hash algorithm {0:?}")]
    UnknownHash(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }
}
