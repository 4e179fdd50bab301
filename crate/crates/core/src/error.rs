use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid level scheme: {0}")]
    InvalidScheme(String),

    /// Every Clebsch-Gordan product entering a ratio vanishes.
    #[error("degenerate level scheme: {0}")]
    DegenerateScheme(String),

    #[error("quadrature did not converge on [{lower:e}, {upper:e}]: error estimate {estimate:e} > tolerance {tolerance:e}")]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        tolerance: f64,
    },

    #[error("four-fold rates assume identical wavepackets at both sites; use the time-resolved two-fold path for mismatched modes")]
    MismatchedWavepackets,

    #[error("missing data: {0}")]
    MissingData(String),

    /// The truncated Fock space loses too much probability for the requested
    /// squeezing.
    #[error("truncation leakage {leakage:.3e} exceeds {limit:.1e} at cutoff {cutoff}; rerun with a larger cutoff")]
    Truncation {
        leakage: f64,
        limit: f64,
        cutoff: usize,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
