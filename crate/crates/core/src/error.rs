use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain on which the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Gamma function was evaluated at a non-positive integer.
    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),

    /// The requested operation is not available for this profile family.
    #[error("unsupported profile family: {0}")]
    UnsupportedFamily(String),

    /// An integral that should be finite is not (e.g. too singular at the origin).
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// A quadrature or transform did not stabilise within its budget.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// Malformed user input (configuration, profile JSON, quadrature overrides).
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// CLI exit code associated with this error: 3 for numerical
    /// non-convergence, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
