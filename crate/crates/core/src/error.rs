//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by the core pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// An input value violates an operation's precondition.
    InvalidInput(String),
    /// The API was called in a way that cannot be satisfied (unknown kind,
    /// node not on tape, bad configuration).
    Usage(String),
    /// Two data artifacts that must agree do not (e.g. label/frame counts).
    Data(String),
    /// A metric has no defined value for the given inputs.
    UndefinedMetric(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            CoreError::Usage(msg) => write!(f, "usage error: {msg}"),
            CoreError::Data(msg) => write!(f, "data error: {msg}"),
            CoreError::UndefinedMetric(msg) => write!(f, "undefined metric: {msg}"),
        }
    }
}

impl core::error::Error for CoreError {}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidInput(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CoreError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CoreError::Data(msg.into())
    }
}
