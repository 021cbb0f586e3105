use alloc::string::String;
use core::fmt;

use crate::backend::Backend;
use crate::word::Word;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the calculus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Text or structure that does not denote a valid object.
    Malformed(String),
    /// Two clopen sets (or a set and an element) over different bases.
    BaseMismatch { left: u8, right: u8 },
    /// Two elements living in different groupoids.
    BackendMismatch { left: Backend, right: Backend },
    /// An operation that needs a nonempty set got the empty set.
    EmptySet,
    /// A cylinder handed to a piece is not inside the piece's source.
    NotInSource { piece_source: Word, cylinder: Word },
    /// Source or range cylinders of a bisection overlap.
    OverlappingPieces { range_side: bool, first: Word, second: Word },
    /// A list of pieces claimed to be a homeomorphism does not cover the
    /// whole space on one side.
    NotTotal { range_side: bool },
    /// Comparison needs `μ(A) < μ(B)` on the odometer.
    ComparisonUnavailable,
    /// A synthesizer precondition does not hold.
    Precondition(String),
    /// A name used in a word or certificate is not bound in the environment.
    UnresolvedName(String),
    /// A synthesized witness failed its own postcondition check.
    Postcondition(String),
    /// An exact computation left the representable range.
    Overflow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Malformed(msg) => write!(f, "malformed input: {msg}"),
            Error::BaseMismatch { left, right } => write!(f, "base mismatch: {left} vs {right}"),
            Error::BackendMismatch { left, right } => {
                write!(f, "backend mismatch: {left} vs {right}")
            }
            Error::EmptySet => f.write_str("operation requires a nonempty clopen set"),
            Error::NotInSource { piece_source, cylinder } => {
                write!(f, "cylinder [{cylinder}] is not inside piece source [{piece_source}]")
            }
            Error::OverlappingPieces { range_side, first, second } => write!(
                f,
                "{} cylinders [{first}] and [{second}] overlap",
                if *range_side { "range" } else { "source" }
            ),
            Error::NotTotal { range_side } => write!(
                f,
                "{} cylinders do not cover the whole space",
                if *range_side { "range" } else { "source" }
            ),
            Error::ComparisonUnavailable => {
                f.write_str("comparison unavailable: requires mu(A) < mu(B)")
            }
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::UnresolvedName(name) => write!(f, "unresolved name `{name}`"),
            Error::Postcondition(msg) => write!(f, "postcondition failed: {msg}"),
            Error::Overflow => f.write_str("exact arithmetic overflow"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn precondition(msg: &str) -> Error {
    Error::Precondition(String::from(msg))
}

pub(crate) fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Postcondition(String::from(msg)))
    }
}
