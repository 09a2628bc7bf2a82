use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An asymptotic formula was requested outside the regime it was derived for.
    #[error("regime violation: {quantity} = {value:.6e} ({requirement})")]
    Regime {
        quantity: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Argument outside the region where a special function is evaluated.
    #[error("argument {arg} outside the supported range: {reason}")]
    Range { arg: Complex64, reason: &'static str },

    /// The formula is singular at the requested point.
    #[error("singular point: {0}")]
    Singular(&'static str),

    #[error("sign of Re(alpha) is ambiguous for alpha = {0}")]
    AmbiguousSign(Complex64),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("refusing to write an empty table")]
    EmptyTable,

    #[error("unknown {kind} `{given}` (expected one of: {expected})")]
    UnknownName { kind: &'static str, given: String, expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    /// Evaluation budget exhausted. `best` holds the components of the
    /// running estimate when the budget ran out.
    #[error("quadrature did not converge within {evals} evaluations (error estimate {err_estimate:.3e})")]
    NonConvergence {
        best: Vec<Complex64>,
        err_estimate: f64,
        evals: usize,
    },

    #[error("integrand returned a non-finite value at x = {at}")]
    Integrand { at: f64 },

    #[error("envelope tail still above threshold at the hard cap x = {cap}")]
    Truncation { cap: f64 },

    #[error("invalid quadrature specification: {0}")]
    Spec(&'static str),
}
