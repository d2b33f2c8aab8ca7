use thiserror::Error;

/// Errors produced by matrix construction, file I/O, and query validation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("non-finite query entry at position {pos}")]
    NonFiniteQuery { pos: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate query: no sampling mass")]
    DegenerateQuery,

    #[error("ragged CSV row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("unparsable number at line {line}, field {field}: {text:?}")]
    BadNumber {
        line: usize,
        field: usize,
        text: String,
    },

    #[error("bad magic bytes: not a {expected} file")]
    BadMagic { expected: &'static str },

    #[error("unsupported {kind} version {found}, expected {expected}")]
    BadVersion {
        kind: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("file truncated while reading {context}")]
    Truncated { context: &'static str },

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error("declared shape {n}x{d} overflows or is implausibly large")]
    DimensionOverflow { n: u64, d: u64 },

    #[error("shape mismatch: expected {expected_n}x{expected_d}, got {actual_n}x{actual_d}")]
    ShapeMismatch {
        expected_n: usize,
        expected_d: usize,
        actual_n: usize,
        actual_d: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration errors that should surface as usage errors (exit code 2).
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by an invalid invocation rather than a runtime failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}
