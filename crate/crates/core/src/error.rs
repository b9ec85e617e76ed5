use thiserror::Error;

/// Errors raised by the analyses in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters A={a}, B={b}, C={c}: need 1 <= A <= B < C")]
    Param { a: i64, b: i64, c: i64 },

    #[error("digit {digit} out of range for C={c}")]
    InvalidDigit { digit: u32, c: u32 },

    #[error("vector {0} has no digit representation within depth {1}")]
    NotInDk(String, usize),

    #[error("addresses have different depths ({0} vs {1})")]
    DepthMismatch(usize, usize),

    #[error("{0} is not a neighbor of the tile")]
    AlphaNotNeighbor(String),

    #[error("instance does not have the 14-neighbor structure: {0}")]
    NotFourteenNeighbors(String),

    #[error("Hata complex is not a 2-sphere: {0}")]
    NotASphere(String),

    #[error("empty face set")]
    EmptyInput,

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("subtiles are not essentially disjoint")]
    NotDisjoint,

    #[error("first subtile has a larger level than the second")]
    LevelOrder,

    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),

    #[error("atom {0} meets the tile boundary in a {1}")]
    ClassificationImpossible(String, String),

    #[error("bad refinement schedule: {0}")]
    BadSequence(String),

    #[error("intersection for z = {0} is not connected")]
    ConnectivityFailure(String),

    #[error("format {format} cannot encode {data}")]
    FormatMismatch { format: String, data: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
