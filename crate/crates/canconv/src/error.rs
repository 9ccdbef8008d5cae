use alloc::string::String;
use core::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    InvalidArgument(String),
    /// Operand shapes are inconsistent with each other.
    ShapeMismatch(String),
    /// An internal structure is not in the state an operation requires
    /// (empty cluster, stale cache, ...).
    InvalidState(String),
    /// A metric had no valid pixels/windows to average over.
    UndefinedMetric(String),
    /// Training produced a non-finite loss.
    Diverged { epoch: usize, step: usize },
    /// A byte container failed to decode.
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Error::UndefinedMetric(msg) => write!(f, "undefined metric: {msg}"),
            Error::Diverged { epoch, step } => {
                write!(f, "training diverged (non-finite loss) at epoch {epoch}, step {step}")
            }
            Error::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid_arg {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! shape_mismatch {
    ($($arg:tt)*) => {
        $crate::error::Error::ShapeMismatch(alloc::format!($($arg)*))
    };
}

macro_rules! invalid_state {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidState(alloc::format!($($arg)*))
    };
}

pub(crate) use {invalid_arg, invalid_state, shape_mismatch};
