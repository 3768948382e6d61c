use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring spec: field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("code {0:#x} does not name an element of this ring")]
    InvalidCode(u64),

    #[error("ring order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u64, cap: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("hiding function violates the constant-on-cosets contract: {0}")]
    ContractViolation(String),

    #[error("element is not a member of the given group or ideal")]
    NotMember,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("the basis representation has no multiplicative identity")]
    NoIdentity,

    #[error("element is not a unit")]
    NotUnit,

    #[error("basis does not span a multiplicatively closed set")]
    NotClosed,

    #[error("low-confidence result: {0}")]
    LowConfidence(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
