use std::io;

use thiserror::Error;

use crate::minimax::Label;

/// Errors produced by the coders and their supporting structures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit stream ended before {wanted} more bit(s) could be read")]
    Truncated { wanted: usize },

    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u64, alphabet: u64 },

    #[error("fraction {num}/{den} is not in [0, 1)")]
    FractionOutOfRange { num: u128, den: u128 },

    #[error("cannot build a code tree from an empty weight list")]
    EmptyWeights,

    #[error("symbol {0} has zero count")]
    ZeroCount(u32),

    #[error("leaf weight {0} is outside the supported range")]
    WeightOutOfRange(i64),

    #[error("weight change would violate the Kraft inequality")]
    KraftInfeasible,

    #[error("stale leaf handle")]
    StaleHandle,

    #[error("label {0:?} is already present in the tree")]
    DuplicateLabel(Label),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed preface: {0}")]
    MalformedPreface(String),

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
