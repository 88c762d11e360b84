use thiserror::Error;

use crate::word::{Letter, Word};

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty word where a nonempty word is required")]
    EmptyWord,

    #[error("cannot identify letter {0} with itself")]
    SameLetter(Letter),

    #[error("no image given for letter {0}")]
    MissingImage(Letter),

    #[error("no element assigned to letter {0}")]
    MissingAssignment(Letter),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {0} out of range (chain varieties need m >= 2)")]
    BadIndex(u32),

    #[error("word uses letter {letter} which is outside X_{n}")]
    BadArity { letter: Letter, n: usize },

    #[error("word has {found} distinct letters, above the configured cap of {cap}")]
    TooManyLetters { found: usize, cap: usize },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("no associated permutation: {0}")]
    NoPermutation(String),

    #[error("associated permutation needs n >= 5 in strict mode, got n = {0}")]
    ArityTooSmall(usize),

    #[error("entry ({i},{j}) has sigma {found}, expected pivot {pivot}")]
    BadPivot {
        i: usize,
        j: usize,
        found: Letter,
        pivot: Letter,
    },

    #[error("no solution: entry ({i},{j}) = {entry} but candidate minor is {minor}, which differs in {variety}")]
    NoSolution {
        i: usize,
        j: usize,
        entry: Word,
        minor: Word,
        variety: String,
    },

    #[error("solving schemes over the variety of all bands is not supported: {0}")]
    Unsupported(String),

    #[error("coordinates ({i},{j}) invalid for an operation of arity {arity}")]
    BadCoordinate { i: usize, j: usize, arity: usize },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("not associative: ({a}{b}){c} != {a}({b}{c})")]
    NotAssociative { a: usize, b: usize, c: usize },

    #[error("not idempotent: element {a} squared is not {a}")]
    NotIdempotent { a: usize },

    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
