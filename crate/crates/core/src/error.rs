use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input violated a documented precondition (bad id, negative weight,
    /// non-bijective permutation, empty result, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural invariant of a graph, partition or ordering does not hold.
    #[error("invalid structure: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::Invalid(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
pub(crate) use invalid;
