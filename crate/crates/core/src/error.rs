use thiserror::Error;

/// A diagnostic produced while reading the circuit text format.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("bit index {index} out of range for a {n}-bit state")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("insertion position {position} out of range for a {n}-bit state")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("cannot remove the only bit of a 1-bit state")]
    RemoveLastBit,

    #[error("two-bit gate on bits {first} and {second} is not nearest-neighbor; route the circuit first")]
    NotAdjacent { first: usize, second: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("corrupt state: {0}")]
    CorruptState(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid bit assignment: {0}")]
    InvalidAssignment(String),

    #[error("height-difference constraint violated at cut {cut}")]
    HdcViolation { cut: usize },

    #[error("target {0}")]
    TargetMismatch(String),

    #[error("solution count is not integral: P(y)*2^n_in = {scaled}")]
    IntegralityViolation { scaled: f64 },

    #[error("both branches of input bit {bit} fall below threshold at step {step} (counts {zero}, {one})")]
    BranchFailure { step: usize, bit: usize, zero: f64, one: f64 },

    #[error("witness check failed: P(y) = {probability} with every input pinned")]
    WitnessCheck { probability: f64 },

    #[error("circuit is not deterministic: {0}")]
    NonDeterministic(String),

    #[error("{what} uses {n} bits, above the oracle cap of {cap}")]
    OracleCap { what: &'static str, n: usize, cap: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
