use std::fmt;

/// Errors raised by the library. Every variant carries enough text to be
/// shown to a user directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Parse(String),
    FieldMismatch(String),
    Dimension(String),
    NotAdmissible(String),
    NotHomogeneous(String),
    CapExceeded { what: String, size: u128, cap: u128 },
    Precondition(String),
    NotInSubspace,
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::FieldMismatch(s) => write!(f, "field mismatch: {s}"),
            Error::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            Error::NotAdmissible(s) => write!(f, "ideal is not admissible: {s}"),
            Error::NotHomogeneous(s) => write!(f, "not Peirce-homogeneous: {s}"),
            Error::CapExceeded { what, size, cap } => write!(
                f,
                "{what}: size {size} exceeds cap {cap}; for monomial algebras use the minimal resolution route"
            ),
            Error::Precondition(s) => write!(f, "precondition failed: {s}"),
            Error::NotInSubspace => write!(f, "vector does not lie in the expected subspace"),
            Error::Invalid(s) => write!(f, "invalid input: {s}"),
        }
    }
}

impl std::error::Error for Error {}
