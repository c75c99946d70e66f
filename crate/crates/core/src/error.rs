use thiserror::Error;

use crate::group::{Group, GroupElement};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("element {element:?} is not a member of {group}")]
    NotInGroup { element: GroupElement, group: Group },

    #[error("{0} is not a finite group")]
    NotFinite(Group),

    #[error("{sub} is not a subgroup of {group}")]
    NotSubgroup { sub: Group, group: Group },

    #[error("representations live on different groups ({0} vs {1})")]
    GroupMismatch(Group, Group),

    #[error("invalid irrep ({flip}, {frequency}) for {group}")]
    InvalidIrrep { group: Group, flip: u8, frequency: u32 },

    #[error("decomposition of `{name}` failed: {reason}")]
    Decomposition { name: String, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("type mismatch: {0}")]
    Type(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
