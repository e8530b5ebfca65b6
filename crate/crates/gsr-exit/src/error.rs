use std::fmt;

/// Everything that can go wrong while evaluating the exit-time law.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    Domain(String),
    /// A series or iteration failed to reach the requested accuracy.
    NonConvergence(String),
    /// Parameters sit on (or numerically indistinguishable from) a
    /// degenerate configuration and the fallback path disagreed with itself.
    DegenerateParameters(String),
    /// A quantity that must be real came back with a non-negligible
    /// imaginary residue.
    SymmetryViolation(String),
    /// Root bracketing exhausted its search range without a sign change.
    NoSignChange(String),
    /// Finite-difference step incompatible with the transform domain.
    StepSize(String),
    /// Censored paths contaminate the requested estimate.
    Censoring(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::NonConvergence(m) => write!(f, "did not converge: {m}"),
            Error::DegenerateParameters(m) => write!(f, "degenerate parameters: {m}"),
            Error::SymmetryViolation(m) => write!(f, "symmetry violation: {m}"),
            Error::NoSignChange(m) => write!(f, "no sign change: {m}"),
            Error::StepSize(m) => write!(f, "step size: {m}"),
            Error::Censoring(m) => write!(f, "censoring: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
