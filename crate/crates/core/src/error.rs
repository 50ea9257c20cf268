use thiserror::Error;

use crate::scalar::Mode;

#[derive(Debug, Error)]
pub enum Error {
    #[error("combined word length {length} exceeds truncation order {order}")]
    TruncationOverflow { length: usize, order: usize },

    #[error("alphabet mismatch: {left} letters vs {right} letters")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{words} words up to order {order} exceed the cap of 10^6")]
    WordCap { words: u128, order: usize },

    #[error("letter {letter} outside alphabet of size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },

    #[error("not invertible: coefficient at the empty word is zero")]
    NotInvertible,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("arithmetic mode mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: Mode, found: Mode },

    #[error("exp(nu) at word {word} is not exactly representable; use float mode")]
    InexactExponential { word: String },

    #[error("small divisor at word {word}: |divisor| = {magnitude:e}")]
    SmallDivisor { word: String, magnitude: f64 },

    #[error("frequency vector is outside the resonance space: nu^u does not vanish on resonant word {word}")]
    OutsideResonanceSpace { word: String },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
