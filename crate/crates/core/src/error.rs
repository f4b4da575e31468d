use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmplitudeError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("division by zero at offset {pos}")]
    DivisionByZero { pos: usize },
    #[error("expression does not evaluate to a finite value")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude '{text}': {source}")]
    Amplitude {
        text: String,
        #[source]
        source: AmplitudeError,
    },
    #[error("symbol '{symbol}' is not in the {alphabet} alphabet")]
    UnknownSymbol { symbol: String, alphabet: String },
    #[error("undeclared state '{0}'")]
    UnknownState(String),
    #[error("duplicate state '{0}'")]
    DuplicateState(String),
    #[error("symbol pair ({0}, {1}) violates orthonormality (max deviation {2:.3e})")]
    GramViolation(String, String, f64),
    #[error("machine is not reversible: {0}")]
    NotReversible(String),
    #[error("second tape is incompatible with the symbol relation at position {position}: ({first}, {second})")]
    IncompatibleTapes {
        position: usize,
        first: String,
        second: String,
    },
    #[error("tape length mismatch: first tape has {0} symbols, second has {1}")]
    TapeLengthMismatch(usize, usize),
    #[error("guess-tape enumeration would need {needed} tapes, above the cap of {cap}")]
    TapeBudget { needed: u128, cap: u64 },
    #[error("word budget exceeded: {0}")]
    WordBudget(String),
    #[error("unknown example '{0}'")]
    UnknownExample(String),
    #[error("unknown oracle '{0}'")]
    UnknownOracle(String),
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("{field}: {msg}")]
    Format { field: String, msg: String },
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
