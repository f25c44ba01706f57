use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid length {len}: {reason}")]
    InvalidLength { len: usize, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    /// Two computations that must agree did not. Always an implementation bug.
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),

    #[error("resource limit: {what} is {requested}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
}

impl Error {
    /// Stable machine-readable kind, used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::InvalidPermutation(_) => "invalid-permutation",
            Error::InvalidLength { .. } => "invalid-length",
            Error::Domain(_) => "domain",
            Error::InternalContradiction(_) => "internal-contradiction",
            Error::ResourceLimit { .. } => "resource-limit",
        }
    }

    /// Process exit code: 2 parse, 3 domain, 4 internal contradiction, 5 resource limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::InvalidPermutation(_) | Error::InvalidLength { .. } | Error::Domain(_) => 3,
            Error::InternalContradiction(_) => 4,
            Error::ResourceLimit { .. } => 5,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contradiction(msg: impl Into<String>) -> Self {
        Error::InternalContradiction(msg.into())
    }
}
