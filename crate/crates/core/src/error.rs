use thiserror::Error;

use crate::lab::PicardReport;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, lengths or grids do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// A mathematically undefined request (homogeneous symbol at zero
    /// frequency, non-admissible exponent triple, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The solution left the finite regime. `time` is the last time at which
    /// the state was still finite and below the H^1 threshold.
    #[error("blow-up after t = {last_valid_time}: {reason}")]
    BlowUp { last_valid_time: f64, reason: String },

    /// Picard iteration stopped contracting; the partial report is kept.
    #[error("Picard iteration does not contract (stopped after {} iterates)", .report.residuals.len())]
    NonContraction { report: Box<PicardReport> },

    #[error("format error: {0}")]
    Format(String),

    #[error("config error for key `{key}`: {constraint}")]
    Config { key: String, constraint: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that signal a numerical failure of an experiment
    /// rather than bad input.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(self, Error::BlowUp { .. } | Error::NonContraction { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
