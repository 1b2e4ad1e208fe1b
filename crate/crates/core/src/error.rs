use core::fmt;

/// Errors raised by geometry construction and solver evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    Domain(&'static str),
    /// The bipolar chart is singular at `(ξ, θ) = (0, π)`, the preimage of
    /// the point at infinity.
    SingularPoint,
    /// The requested Cartesian point is one of the coordinate poles `(±α, 0)`.
    Pole,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::SingularPoint => write!(f, "bipolar chart is singular at (xi, theta) = (0, pi)"),
            Error::Pole => write!(f, "point coincides with a bipolar pole (±alpha, 0)"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
