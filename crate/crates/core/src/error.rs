use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("inadmissible parameters q={q}, b={b}: need q >= 2 and b/q an integer >= 2")]
    InadmissibleParams { q: u32, b: u32 },

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("label {label} at word {word:?} violates the {clause} condition of a tree mapping")]
    TreeClause {
        word: String,
        clause: &'static str,
        label: i64,
    },

    #[error("the set must contain 0")]
    MissingZero,

    #[error("element {element} is not divisible by {divisor}")]
    NotDivisible { element: BigInt, divisor: BigInt },

    #[error("K={k} is not coprime with b={b}")]
    NotCoprime { k: i64, b: u32 },

    #[error("xi={0} lies outside T_b")]
    OutsideTb(f64),

    #[error("label {label} outside the digit range -1..={max}")]
    LabelRange { label: i64, max: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("label of word {0:?} is not determined by the mapping")]
    UndeterminedLabel(String),

    #[error("tree mapping failed validation: {0}")]
    Unvalidated(String),

    #[error("unavailable: {0}")]
    Unavailable(String),
}
