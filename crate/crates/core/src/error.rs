use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid modulus {k}: {reason}")]
    InvalidModulus { k: String, reason: &'static str },

    #[error("NotCoprime: gcd({value}, {k}) != 1")]
    NotCoprime { value: String, k: u64 },

    #[error("InvalidRegion: {value} is outside U_{k}")]
    InvalidRegion { value: u64, k: u64 },

    #[error("NotSquare: modulus {k} is not a perfect square >= 9")]
    NotSquare { k: u64 },

    #[error("DivisibilityViolation: {k} does not divide n*v - d*u")]
    DivisibilityViolation { k: u64 },

    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

impl Error {
    pub(crate) fn not_coprime(value: impl ToString, k: u64) -> Self {
        Error::NotCoprime {
            value: value.to_string(),
            k,
        }
    }
}
