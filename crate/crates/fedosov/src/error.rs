//! Error type shared by the fallible operations of the engine.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Frame dimensions of two operands disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// Parameter universes of two operands disagree.
    ParamMismatch,
    /// A name not declared in the session's parameter universe.
    UnknownParam(String),
    /// An operation that requires Z2-homogeneous input got a mixed one.
    Inhomogeneous(&'static str),
    /// A matrix block that must be invertible is singular (or not constant).
    SingularBlock(&'static str),
    /// Two computation routes that must agree produced different values.
    MethodDisagreement(&'static str),
    /// Text that could not be parsed as a polynomial or form.
    Parse(String),
    /// Invalid configuration input.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "frame dimension mismatch: expected {expected}, found {found}")
            }
            Error::ParamMismatch => write!(f, "parameter universes differ"),
            Error::UnknownParam(name) => write!(f, "unknown parameter `{name}`"),
            Error::Inhomogeneous(what) => write!(f, "{what} requires homogeneous input"),
            Error::SingularBlock(which) => write!(f, "singular or non-constant block {which}"),
            Error::MethodDisagreement(what) => {
                write!(f, "internal convention bug: {what} routes disagree")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
