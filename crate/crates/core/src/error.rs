use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed record at {position}: {message}")]
    Malformed { position: String, message: String },

    #[error("nonpositive ask {ask} at {position}")]
    NonPositiveAsk { position: String, ask: f64 },

    #[error("quote at {position} trades {currency} against itself")]
    SameCurrency { position: String, currency: String },

    #[error("duplicate quote {market}/{base}->{quote}")]
    DuplicateQuote { market: String, base: String, quote: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot plant a cycle of length {length}: only {available} currencies available")]
    InfeasiblePlant { length: usize, available: usize },

    #[error("edge {from}->{to} has nonpositive rate {rate}")]
    NonPositiveRate { from: usize, to: usize, rate: f64 },

    #[error("transformed weight {max_weight} overflows path sums over {n} nodes")]
    WeightOverflow { max_weight: f64, n: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("diagonal entry ({0},{0}) must be zero")]
    NonZeroDiagonal(usize),

    #[error("edge {from}->{to} not present in graph")]
    MissingEdge { from: usize, to: usize },

    #[error("not a cycle: {0}")]
    NotACycle(String),

    #[error("column subset is empty")]
    EmptyColumns,

    #[error("inconsistent witness for leg {from}->{to}")]
    InconsistentWitness { from: usize, to: usize },

    #[error("graph with {n} nodes exceeds enumeration cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("matrix text: {0}")]
    MatrixText(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
