use thiserror::Error;

use crate::alphabet::Letter;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet letters must be distinct (got m = n = {0})")]
    DegenerateAlphabet(i64),

    #[error("alphabet ({m}, {n}) is not expansion-valid: both letters must be positive")]
    NotExpansionValid { m: i64, n: i64 },

    #[error("empty sequence has no run-length encoding")]
    EmptySequence,

    #[error("expansion needs a non-empty sequence of starting points")]
    EmptyStartingPoints,

    #[error("torsion by an empty base sequence has no intermediate expansions")]
    EmptyBase,

    #[error("run length {value} at position {index} is not positive")]
    NonPositiveRun { index: usize, value: i64 },

    #[error("symbol {value} is not a letter of the alphabet ({m}, {n})")]
    SymbolOutsideAlphabet { value: i64, m: i64, n: i64 },

    #[error("expansion of {len} terms exceeds the oracle cap of {cap} terms (too large for direct oracle)")]
    TooLarge { len: u64, cap: u64 },

    #[error("expansion length overflows 64 bits")]
    LengthOverflow,

    #[error("word length {0} exceeds the packed maximum of 31")]
    WordTooLong(usize),

    #[error("code {code} does not fit in {len} bits")]
    CodeOutOfRange { code: u32, len: u32 },

    #[error("operation needs a non-empty word")]
    EmptyWord,

    #[error("k_max {0} is out of range (1..=31)")]
    KMaxOutOfRange(u32),

    #[error("table build needs about {needed} bytes, over the memory cap of {cap} bytes")]
    MemoryBudget { needed: u64, cap: u64 },

    #[error("table has no level {k} (k_max = {k_max})")]
    LevelMissing { k: u32, k_max: u32 },

    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a permutation: entry {index} maps to {value}, which is out of range or repeated")]
    NotPermutation { index: usize, value: u32 },

    #[error("level {k} of map {letter} is not a permutation (entry {index})")]
    LevelNotPermutation {
        letter: Letter,
        k: u32,
        index: usize,
    },

    #[error("cache file: {0}")]
    CacheFormat(String),

    #[error("cache file checksum mismatch")]
    ChecksumMismatch,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
