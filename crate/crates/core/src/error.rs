use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock truncation: N = {0}, need N >= 2")]
    InvalidTruncation(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid device parameters: {0}")]
    InvalidParams(String),

    /// Coupling law has no formula at this phase; `lambda` is Λ(φ).
    #[error(
        "phase {phi:.6} rad gives Lambda = {lambda:.4}, outside both validity branches \
         (Lambda <= -5 or Lambda >= 5); pick a phase deeper in the strong-coupling branch \
         or supply explicit g/gPrime/E overrides"
    )]
    OutsideValidity { phi: f64, lambda: f64 },

    #[error("no resonant phase: {0}")]
    NoSolution(String),

    #[error("step size {dt} ns too large: must be <= {max} ns to resolve the e^(iEt) phase")]
    StepSize { dt: f64, max: f64 },

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("pulse area {area} and coupling {g} have opposite signs")]
    SignMismatch { area: f64, g: f64 },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (max |U^dag U - I| = {0:e})")]
    NonUnitary(f64),

    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParams(_) | Error::InvalidPulse(_) => 2,
            Error::OutsideValidity { .. } | Error::NoSolution(_) | Error::Domain(_) => 3,
            Error::StepSize { .. } | Error::IntegrationFailure(_) => 4,
            _ => 1,
        }
    }

    pub(crate) fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
