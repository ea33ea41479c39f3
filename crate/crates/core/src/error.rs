use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    InvalidSymbol { symbol: u64, alphabet: usize },

    #[error("invalid alphabet size {0} (supported: 1..=64)")]
    InvalidAlphabet(usize),

    #[error("valence size {size} is out of range for an alphabet of size {alphabet}")]
    InvalidArity { size: usize, alphabet: usize },

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("automaton alphabet has {automaton} symbols but the word has {word}")]
    AlphabetMismatch { automaton: usize, word: usize },

    #[error("malformed automaton: {0}")]
    MalformedNfa(String),

    #[error("Kayleigh graphs need an odd length, got {0}")]
    EvenLengthUnsupported(usize),

    #[error("selected runs overlap")]
    OverlappingRuns,

    #[error("selected runs touch; each loop needs its own state")]
    AdjacentRuns,

    #[error("invalid run selection: {0}")]
    InvalidSelection(String),

    #[error("word length {len} exceeds the exact-search limit {limit} for alphabet size {alphabet}")]
    SearchLimitExceeded { len: usize, limit: usize, alphabet: usize },

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("argument outside domain: {0}")]
    DomainError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
