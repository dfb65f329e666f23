use alloc::string::String;
use core::fmt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A malformed argument: bad axis index, overlapping axis sets,
    /// mismatched alphabets and the like.
    Argument(String),
    /// The input violates a documented precondition (for example a pair that
    /// is not in normal form).
    Precondition(String),
    /// An enumeration or exhaustive search would exceed its size cap.
    Capacity(String),
    /// A protocol or scheme description is inconsistent.
    Spec(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(m) => write!(f, "invalid argument: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::Capacity(m) => write!(f, "capacity exceeded: {m}"),
            Error::Spec(m) => write!(f, "invalid definition: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
