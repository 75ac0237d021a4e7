//! Error type shared by the whole crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by grid construction, quadrature and the iteration engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid or mesh parameters (message names the offending field).
    InvalidParameter(String),
    /// A field and an operator were built on different grids.
    GridMismatch,
    /// A field or sample contained NaN or an infinity where finiteness is required.
    NonFiniteValue(String),
    /// Semigroup evaluation requested at t <= 0.
    NonPositiveTime(f64),
    /// An improper integral diverges for the requested exponent range.
    DivergentIntegral { exponent: f64 },
    /// An operation contractually restricted to nonnegative fields saw a signed one.
    SignedField(&'static str),
    /// The uniqueness machinery requires q > N/2.
    UniquenessExponent { q: f64, dim: u32 },
    /// A root find or fixed-point sweep failed to converge.
    NonConvergence(String),
    /// Requested radius is below the resolved part of the grid; the payload
    /// is the analytic estimate of the unresolved mass.
    BelowResolution { tail_estimate: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::GridMismatch => write!(f, "field and operator live on different grids"),
            Error::NonFiniteValue(what) => write!(f, "non-finite value in {what}"),
            Error::NonPositiveTime(t) => write!(f, "time must be positive, got {t}"),
            Error::DivergentIntegral { exponent } => {
                write!(f, "integral diverges at the lower limit for exponent {exponent} <= 1")
            }
            Error::SignedField(op) => write!(f, "{op} requires a nonnegative field"),
            Error::UniquenessExponent { q, dim } => write!(
                f,
                "uniqueness class requires q > N/2 (got q = {q}, N = {dim}); \
                 the case q <= N/2 is outside the contraction estimate"
            ),
            Error::NonConvergence(msg) => write!(f, "iteration failed to converge: {msg}"),
            Error::BelowResolution { tail_estimate } => write!(
                f,
                "radius below grid resolution (unresolved mass estimate {tail_estimate:.3e})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
