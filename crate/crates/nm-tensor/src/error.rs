use std::fmt;

/// Errors raised by tensor construction and the tensor ops.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorError {
    /// A shape precondition failed; `axis` names the offending axis or field.
    ShapeMismatch {
        axis: &'static str,
        expected: usize,
        got: usize,
    },
    /// A spec or parameter set is internally inconsistent.
    InvalidSpec(String),
    /// An input that must be non-empty was empty.
    EmptyInput(&'static str),
    /// The padded input is smaller than the kernel on the named axis.
    KernelTooLarge {
        axis: &'static str,
        padded: usize,
        kernel: usize,
    },
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::ShapeMismatch {
                axis,
                expected,
                got,
            } => write!(f, "shape mismatch on {axis}: expected {expected}, got {got}"),
            TensorError::InvalidSpec(msg) => write!(f, "invalid spec: {msg}"),
            TensorError::EmptyInput(what) => write!(f, "empty input: {what}"),
            TensorError::KernelTooLarge {
                axis,
                padded,
                kernel,
            } => write!(
                f,
                "kernel does not fit on {axis}: padded extent {padded} < kernel {kernel}"
            ),
        }
    }
}

impl std::error::Error for TensorError {}
