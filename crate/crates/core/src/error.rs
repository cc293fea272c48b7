use std::io;

use thiserror::Error;

/// Errors reported by the structures in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {value} out of range [{lo}..{hi}]")]
    OutOfRange { value: usize, lo: usize, hi: usize },

    #[error("no occurrence number {rank} of {symbol}")]
    NoSuchOccurrence { symbol: u64, rank: usize },

    #[error("input is not a permutation of [1..{n}]: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("empty input")]
    EmptyInput,

    #[error("frequency of symbol {index} is zero")]
    ZeroFrequency { index: usize },

    #[error("invalid arity {0}, must be in [2..255]")]
    InvalidArity(usize),

    #[error("depth limit {max_depth} cannot hold {leaves} leaves at arity {arity}")]
    InfeasibleDepth {
        max_depth: usize,
        leaves: usize,
        arity: usize,
    },

    #[error("lengths do not match: {0}")]
    LengthMismatch(String),

    #[error("invalid labeling: {0}")]
    InvalidLabels(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(value: usize, lo: usize, hi: usize) -> Result<()> {
    if value < lo || value > hi {
        Err(Error::OutOfRange { value, lo, hi })
    } else {
        Ok(())
    }
}
