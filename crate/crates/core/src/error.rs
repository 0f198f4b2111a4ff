use thiserror::Error;

use crate::collapse::PairFault;

/// Errors raised when an input does not meet an operation's preconditions.
///
/// Failed mathematical checks are not errors: they are carried as data in the
/// various reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid cell id {0:?}")]
    InvalidCellId(String),
    #[error("duplicate cell {0}")]
    DuplicateCell(String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("cell set is not a subcomplex: {missing} is a face of {cell} but is absent")]
    NotSubcomplex { cell: String, missing: String },
    #[error("{small} is not contained in {big}")]
    NotContained { small: String, big: String },
    #[error("no level given for cell {0}")]
    MissingLevel(String),
    #[error("level map is not monotone: level({child}) = {child_level} > level({parent}) = {parent_level}")]
    NonMonotoneLevels {
        parent: String,
        child: String,
        parent_level: u32,
        child_level: u32,
    },
    #[error("stratification violates the frontier axiom at cell {cell} against stratum {stratum}")]
    FrontierViolated { cell: String, stratum: usize },
    #[error("stratum relation is not antisymmetric between strata {0} and {1}")]
    StrataNotAntisymmetric(usize, usize),
    #[error("no value given for cell {0}")]
    MissingValue(String),
    #[error("value map is not injective: {first} and {second} both take value {value}")]
    NotInjective {
        first: String,
        second: String,
        value: String,
    },
    #[error("interval [{lo}, {hi}] contains {count} cell values, expected exactly one")]
    Interval { lo: String, hi: String, count: usize },
    #[error("value {0} is not attained by any cell")]
    NotAttained(String),
    #[error("filtered certificate replayed without a stratification")]
    MissingStratification,
    #[error("pair {index} of the certificate is invalid: {reason}")]
    InvalidPair { index: usize, reason: PairFault },
    #[error("cell {0} is not critical")]
    NotCritical(String),
    #[error("stratified discrete Morse function check is {0}; refusing to sweep")]
    NotValidMorse(&'static str),
    #[error("not a valid chain: {0}")]
    InvalidChain(String),
    #[error("cell set is not convex: {middle} lies between {lower} and {upper}")]
    NotConvex {
        lower: String,
        middle: String,
        upper: String,
    },
    #[error("invalid multivector field: {0}")]
    InvalidMultivectorField(String),
    #[error("multivector field is cyclic through parts {0:?}")]
    CyclicField(Vec<usize>),
    #[error("{0}")]
    Invariant(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
