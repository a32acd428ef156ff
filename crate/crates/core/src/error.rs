use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// An operation's precondition on its mathematical input does not hold.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured size cap (group order, enumeration volume, statevector
    /// size) would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// Building the instance hit a base element sharing a factor with the
    /// modulus. The factor is reported instead of an instance.
    #[error("base {base} shares the factor {factor} with the modulus")]
    BaseSharesFactor { base: u64, factor: u64 },
    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
