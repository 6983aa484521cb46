use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Parameter and grid problems are caller mistakes; [`Error::Numerical`]
/// and [`Error::Overflow`] mean the computation itself broke down.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time grid is not uniform at sample {index} (step {found}, expected {expected})")]
    NonUniformGrid {
        index: usize,
        found: f64,
        expected: f64,
    },

    #[error("time grid must start at 0, found {0}")]
    GridOrigin(f64),

    #[error("trajectory needs at least 2 samples, found {0}")]
    TrajectoryTooShort(usize),

    #[error("trajectory columns have mismatched lengths (t: {t}, q: {q}, v: {v})")]
    LengthMismatch { t: usize, q: usize, v: usize },

    #[error(
        "initial state (q0 = {q0}, v0 = {v0}) is off the decaying branch v0 = -(eta/m) q0; \
         the transformed equation would excite the growing mode (relative violation {violation:e})"
    )]
    BranchConstraint { q0: f64, v0: f64, violation: f64 },

    #[error("trajectory is not strictly monotonic at sample {0}; the position-side integral needs a bijective path")]
    NotMonotonic(usize),

    #[error("interval end {end} precedes start {start}")]
    InvalidInterval { start: f64, end: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("solution overflowed at x = {x}")]
    Overflow { x: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the computation rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Overflow { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {value}")))
    }
}
