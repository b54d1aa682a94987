use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZoneError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("weight constant overflow")]
    Overflow,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("automaton has no states")]
    NoStates,
    #[error("no initial state declared")]
    NoInitialState,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("invariant of state `{state}` has non-upper atom `{atom}`")]
    InvalidInvariant { state: String, atom: String },
    #[error("constant {0} is too large")]
    ConstantTooLarge(u32),
    #[error("inconsistent automaton: {0}")]
    Inconsistent(String),
}

/// Syntax or semantic error in a model file, with a 1-based position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReachError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("time limit of {0:?} exceeded")]
    Timeout(std::time::Duration),
}
