use thiserror::Error;

use crate::tdse::AutocorrelationSeries;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("singular Mathieu order: nu^2 = {nu_sq} is within {tolerance:e} of 1")]
    SingularOrder { nu_sq: f64, tolerance: f64 },

    #[error("ambiguous Mathieu branch at q = {q}: overlaps {best:.6} and {runner_up:.6}")]
    BranchAmbiguity { q: f64, best: f64, runner_up: f64 },

    #[error("no resonance: nearest order N = {0} is below 1")]
    NoResonance(i64),

    #[error("resonance singularity: {0}")]
    ResonanceSingularity(String),

    #[error("degenerate spectrum: second derivative of the energy vanishes")]
    DegenerateSpectrum,

    #[error("configuration error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("integration became unstable at t = {time}: norm drift {drift:e}")]
    Unstable {
        time: f64,
        drift: f64,
        partial: Box<AutocorrelationSeries>,
    },

    #[error("detection error: {0}")]
    Detection(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn config_at(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line: Some(line),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) | Error::Io(_) => 1,
            Error::Detection(_) | Error::Fit(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
