use std::io;

use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    /// An operation received a field in the wrong representation.
    #[error("representation error: expected {expected} field")]
    Representation { expected: &'static str },

    /// A parameter lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grids, time grids or index ranges do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// An input violates an operation's precondition (e.g. non-solenoidal data).
    #[error("precondition error: {0}")]
    Precondition(String),

    /// The time integrator left the resolved regime.
    #[error("stability error at t = {time}: {reason}")]
    Stability { time: f64, reason: String },

    /// A generator parameter is not resolvable on the grid.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Too few usable samples for a log-log fit, or a zero denominator.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Invalid or inconsistent experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed snapshot or manifest file.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn domain(msg: impl Into<String>) -> LabError {
    LabError::Domain(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> LabError {
    LabError::Shape(msg.into())
}
