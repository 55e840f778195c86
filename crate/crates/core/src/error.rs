use thiserror::Error;

/// Errors raised by the weighted thermodynamic formalism routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid factor chain: {0}")]
    InvalidChain(String),

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("level mismatch: expected level {expected}, found {found}")]
    LevelMismatch { expected: usize, found: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("prefix too short: need {needed} symbols, got {got}")]
    PrefixTooShort { needed: usize, got: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("enumeration budget exhausted: word length {n} needs {words} words, budget is {budget}")]
    Budget { n: usize, words: f64, budget: u64 },

    #[error("n_max = {0} is too small: an enclosure needs word lengths up to at least 2")]
    NMaxTooSmall(usize),

    #[error("non-finite cascaded sum at word length {0}")]
    NonFinite(usize),

    #[error("pressure enclosure width {width:e} is too wide for finite-difference step {step:e}")]
    EnclosureTooWide { width: f64, step: f64 },

    #[error("constraint lies on the boundary of the admissible set: {0}; perturb it into the interior")]
    BoundaryConstraint(String),

    #[error("optimizer did not converge in {iterations} iterations (gradient norm {grad_norm:e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    #[error("measure is not in exact product mode")]
    NotExact,

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
