use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("{what}: {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Two intensities are closer than the separation tolerance; every bound
    /// divides by their difference.
    #[error("degenerate intensities: |{a} - {b}| < {tol}")]
    DegenerateIntensities { a: f64, b: f64, tol: f64 },

    /// Three- and four-decoy bounds are not valid when any intensity is zero.
    #[error("nonpositive intensity {0} not allowed for this bound set")]
    NonpositiveIntensity(f64),

    #[error("intensity set must hold {expected} values, got {got}")]
    IntensityCount { expected: &'static str, got: usize },

    #[error("intensities must be strictly descending: mu[{index}] = {value}")]
    NotDescending { index: usize, value: f64 },

    /// No clicks: a conditional probability has zero denominator.
    #[error("degenerate operating point: click probability is zero")]
    NoClicks,

    #[error("gain table must be {expected}x{expected}, got {got} entries")]
    GainShape { expected: usize, got: usize },

    #[error("gain {value} at ({k},{l}) is outside [0,1]")]
    GainRange { k: usize, l: usize, value: f64 },

    #[error("invalid detector outcome: only (1,0) and (0,1) are announced")]
    InvalidOutcome,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }
}
