use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("word has odd length {0}, it has no preimage under the morphism")]
    OddLength(usize),
    #[error("block {block} at position {position} is not 01 or 10")]
    NotInImage { position: usize, block: String },
    #[error("factor window did not saturate for length {length} (window factor reached {factor})")]
    BudgetExceeded { length: usize, factor: usize },
    #[error("{0} is not a factor of the Thue-Morse word")]
    NotAFactor(String),
    #[error("word of length {length} is too short (need at least {min})")]
    TooShort { length: usize, min: usize },
    #[error("{0} has no extensible 2-reading frame")]
    NoExtensibleFrame(String),
    #[error("the empty word has no 2-abelian class tuple")]
    EmptyWord,
    #[error("cannot locate the odd frame of {0}: no pair and shorter than 4 letters")]
    FrameAmbiguous(String),
    #[error("malformed short coding {coding:?}: {reason}")]
    MalformedCoding { coding: String, reason: &'static str },
    #[error("no factor realizes the vect tuple {0}")]
    InconsistentTuple(String),
    #[error("PAIRS is only defined for even lengths, got {0}")]
    OddArgument(u64),
    #[error("index {0} is outside the supported range")]
    Overflow(u64),
    #[error("kernel subsequence {0} does not reduce to the basis")]
    NonClosure(String),
    #[error("insufficient samples: {rows} rows for {columns} columns")]
    InsufficientSamples { rows: usize, columns: usize },
    #[error("relation modulus {relation} does not divide {modulus}")]
    ModulusMismatch { relation: u64, modulus: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
