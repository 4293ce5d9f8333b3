use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands live in different rings (parameter specs, fans, truncations).
    #[error("structural mismatch: {0}")]
    Structural(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The push-forward recursion cannot determine a value.
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("incompatible tuple: cones {first} and {second} disagree on {monomial}")]
    Incompatible {
        first: String,
        second: String,
        monomial: String,
    },
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}
