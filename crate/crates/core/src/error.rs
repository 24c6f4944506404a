use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QrmError {
    /// A requested photon number (or the support of a closed-form state) does
    /// not fit inside the truncated Fock space.
    #[error("truncation too small: need n_max >= {needed}, have n_max = {n_max}")]
    Truncation { needed: usize, n_max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("expectation value has imaginary residue {imag:e}")]
    NumericConsistency { imag: f64 },

    /// Rabi frequency vanishes (JC ground branch at n = 0 on resonance).
    #[error("degenerate branch: Rabi frequency is zero for {family}")]
    DegenerateBranch { family: String },

    /// The requested dressed state reduces to the zero vector.
    #[error("null state: {0}")]
    NullState(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

impl QrmError {
    /// Process exit status for a failed command.
    pub fn exit_code(&self) -> i32 {
        match self {
            QrmError::InvalidConfig { .. }
            | QrmError::InvalidParams(_)
            | QrmError::UnknownColumn(_)
            | QrmError::Truncation { .. } => EXIT_INVALID_CONFIG,
            QrmError::Io { .. } => EXIT_IO,
            _ => EXIT_CHECK_FAILURE,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        QrmError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, QrmError>;
