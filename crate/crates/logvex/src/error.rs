use std::fmt;

/// Library error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid body construction or body argument (dimension mismatch,
    /// nonpositive parameter, unbounded facet set, ...).
    InvalidBody(String),
    /// Invalid phi construction or argument (negative t, bad knots, ...).
    InvalidPhi(String),
    /// The integral diverges: phi never increases enough to be integrable.
    Divergent(String),
    /// A Monte Carlo or geometric computation degenerated (zero acceptances,
    /// empty slice, ...).
    Degenerate(String),
    /// Rejection sampling acceptance rate fell below the documented floor.
    Inefficient { acceptance: f64 },
    /// A ratio with zero denominator (phi(rt) = 0) was requested.
    UndefinedRatio(String),
    /// Malformed configuration input.
    InvalidConfig(String),
    /// Operation not available for this variant combination.
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBody(m) => write!(f, "invalid body: {m}"),
            Error::InvalidPhi(m) => write!(f, "invalid phi: {m}"),
            Error::Divergent(m) => write!(f, "divergent integral: {m}"),
            Error::Degenerate(m) => write!(f, "degenerate computation: {m}"),
            Error::Inefficient { acceptance } => {
                write!(f, "rejection sampling too inefficient: acceptance {acceptance:.3e} < 1e-4")
            }
            Error::UndefinedRatio(m) => write!(f, "undefined ratio: {m}"),
            Error::InvalidConfig(m) => write!(f, "invalid config: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
