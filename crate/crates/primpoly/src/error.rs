//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two field elements belong to different field contexts.
    ContextMismatch,
    /// The operation is mathematically undefined for this input.
    Domain(&'static str),
    /// The context was built without the factorization of the group order,
    /// which this operation requires.
    MissingFactorization,
    /// Malformed or out-of-contract input.
    InvalidInput(String),
    /// Parameters exceed the sizes this crate supports.
    UnsupportedSize(String),
    /// The modulus polynomial is unusable (e.g. zero constant term).
    InvalidModulus(&'static str),
    /// The circuit contains gates without a classical basis action.
    NotClassical(&'static str),
    /// A basis map sent two support states to the same index.
    NonInjectiveMap,
    /// A stated precondition on the state was violated.
    Precondition(&'static str),
    /// Sparse states disagree on register layout.
    RegisterMismatch,
    /// The polynomial is reducible where an irreducible one is required.
    NotIrreducible,
    /// The element search gave up after its candidate budget.
    SearchExhausted { candidates_tried: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ContextMismatch => write!(f, "field elements come from different contexts"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::MissingFactorization => {
                write!(f, "context lacks the factorization of the group order")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::UnsupportedSize(msg) => write!(f, "unsupported size: {msg}"),
            Error::InvalidModulus(msg) => write!(f, "invalid modulus: {msg}"),
            Error::NotClassical(msg) => write!(f, "not a classical-reversible circuit: {msg}"),
            Error::NonInjectiveMap => write!(f, "basis map is not injective on the support"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::RegisterMismatch => write!(f, "states disagree on register layout"),
            Error::NotIrreducible => write!(f, "polynomial is reducible"),
            Error::SearchExhausted { candidates_tried } => {
                write!(f, "search exhausted after {candidates_tried} candidates")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
