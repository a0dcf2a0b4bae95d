use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A factor had an invalid size parameter, or the factor list was empty.
    InvalidFactor(String),
    /// Total dimension does not fit in `usize`.
    DimensionOverflow,
    DimensionMismatch { expected: usize, found: usize },
    SpaceMismatch,
    UnknownFactor(usize),
    ModeOutOfRange { mode: usize, modes: usize },
    NotHermitian { what: String, deviation: f64 },
    /// `[H_S, H_E]` did not vanish for a model.
    SubsystemsDoNotCommute(f64),
    Normalization { what: String, deviation: f64 },
    InvalidParameter(String),
    /// The model is not block-diagonal in the system eigenbasis (`[H_S, H_SE] ≠ 0`).
    NotCaseB(f64),
    /// Matrix exponential input too large to square back without overflow.
    Overflow,
    NoConvergence(String),
    /// The analytic and finite-difference routes disagree beyond tolerance.
    PathDisagreement {
        quantity: &'static str,
        t: f64,
        analytic: f64,
        finite_difference: f64,
    },
    InvalidGrid(String),
    TruncationNotConverged { relative_change: f64 },
    UnsupportedOrder(usize),
    NotCentral(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFactor(msg) => write!(f, "invalid factor: {msg}"),
            Error::DimensionOverflow => write!(f, "total dimension overflows usize"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::SpaceMismatch => write!(f, "operators live on different spaces"),
            Error::UnknownFactor(i) => write!(f, "space has no factor {i}"),
            Error::ModeOutOfRange { mode, modes } => {
                write!(f, "fermion mode {mode} out of range for {modes} modes")
            }
            Error::NotHermitian { what, deviation } => {
                write!(f, "{what} is not Hermitian (max |A - A†| = {deviation:e})")
            }
            Error::SubsystemsDoNotCommute(n) => write!(f, "[H_S, H_E] = {n:e} is not zero"),
            Error::Normalization { what, deviation } => {
                write!(f, "{what} is not normalized (deviation {deviation:e})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotCaseB(n) => {
                write!(f, "model is not block-diagonal in the system basis ({n:e})")
            }
            Error::Overflow => write!(f, "matrix exponential overflows"),
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
            Error::PathDisagreement { quantity, t, analytic, finite_difference } => write!(
                f,
                "{quantity} at t = {t}: analytic {analytic:e} vs finite difference {finite_difference:e}"
            ),
            Error::InvalidGrid(msg) => write!(f, "invalid time grid: {msg}"),
            Error::TruncationNotConverged { relative_change } => write!(
                f,
                "Fock truncation not converged (relative change {relative_change:e} on doubling)"
            ),
            Error::UnsupportedOrder(k) => write!(f, "unsupported expansion order {k}"),
            Error::NotCentral(n) => {
                write!(f, "commutator is not central (residue {n:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
