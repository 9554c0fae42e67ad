//! Error type shared by every pipeline stage.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between raw bytes and an evaluation report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// First token of a netpbm stream is not P2/P3/P5/P6.
    #[error("unknown netpbm magic {0:?}")]
    UnknownMagic(String),
    /// Stream ended before the promised samples arrived.
    #[error("truncated netpbm data: {0}")]
    TruncatedData(&'static str),
    /// Header maxval of 0 or above 65535.
    #[error("netpbm maxval {0} out of range 1..=65535")]
    MaxvalOutOfRange(u64),
    /// A header, sample, or value token that is not a decimal number.
    #[error("non-numeric token {0:?}")]
    NonNumericToken(String),
    /// All pixels share one intensity; automatic thresholding is undefined.
    #[error("constant image: no threshold separates foreground from background")]
    ConstantImage,
    /// Image below the minimum size an operation can work on.
    #[error("image {width}x{height} too small, need at least {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    /// A mask with zero foreground pixels where at least one is required.
    #[error("mask has no foreground pixels")]
    EmptyMask,
    /// A centroid that does not lie inside the mask grid.
    #[error("centroid pixel ({x}, {y}) outside the mask grid")]
    CentroidOutOfGrid { x: usize, y: usize },
    /// Bandwidth selection needs at least two rings with geometric extent.
    #[error("bandwidth needs at least 2 effective rings, got {0}")]
    TooFewRings(usize),
    /// Ring-count vector sums to zero; cannot be normalized.
    #[error("ring counts are all zero")]
    AllZeroCounts,
    /// Vectors of different lengths compared.
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    /// A zero vector has no direction to compare.
    #[error("zero vector has no cosine direction")]
    ZeroVector,
    /// Query descriptor incompatible with the database contents.
    #[error(
        "descriptor mismatch: query is {query_mode}/{query_len}, database is {db_mode}/{db_len}"
    )]
    ModeMismatch {
        query_mode: String,
        query_len: usize,
        db_mode: String,
        db_len: usize,
    },
    /// Database stream did not start with a valid header line.
    #[error("bad database header: {0}")]
    BadHeader(String),
    /// Two database records share an id.
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    /// A database row with the wrong field or value count.
    #[error("record {id:?} has {got} values, expected {expected}")]
    RaggedRow {
        id: String,
        got: usize,
        expected: usize,
    },
    /// Recall is undefined when the database holds no relevant items.
    #[error("no relevant items in database")]
    NoRelevantInDb,
    /// Precision is undefined over an empty result set.
    #[error("empty result set")]
    EmptyResultSet,
    /// Effectiveness branch A/T requested with T = 0.
    #[error("effectiveness undefined for requested count T = 0")]
    UndefinedBranch,
    /// A query label absent from the database.
    #[error("label {0:?} not present in database")]
    UnknownLabel(String),
    /// Dataset canvas too small to hold any shape.
    #[error("canvas {0} too small, minimum {1}")]
    CanvasTooSmall(usize, usize),
}
