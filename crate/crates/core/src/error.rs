use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid address {address} for tree {tree}")]
    InvalidAddress { address: String, tree: String },

    #[error("substitution addresses {first} and {second} are prefix-related")]
    PrefixConflict { first: String, second: String },

    #[error("unknown state {0}")]
    UnknownState(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("rank conflict for symbol {symbol}: {first} vs {second}")]
    RankConflict {
        symbol: String,
        first: usize,
        second: usize,
    },

    #[error("invalid machine: {0}")]
    InvalidMachine(String),

    #[error("second transducer is not linear and nondeleting")]
    NotLinearNondeleting,

    #[error("chain of length {0} is too short (need at least 3)")]
    ChainTooShort(usize),

    #[error("empty chain")]
    EmptyChain,

    #[error("invalid provenance: {0}")]
    InvalidProvenance(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("trace branch {requested} does not exist ({available} branches)")]
    NoSuchBranch { requested: usize, available: usize },

    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{line}:{column}: in {machine}: {message}")]
    Validation {
        machine: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown name {0}")]
    UnknownName(String),

    #[error("{0}")]
    Io(String),
}
