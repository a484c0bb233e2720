#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SsmError {
    NonFiniteInput,
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    InvalidParams(String),
}

impl std::fmt::Display for SsmError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SsmError::NonFiniteInput => write!(f, "scan input contains non-finite values"),
            SsmError::ShapeMismatch {
                what,
                expected,
                got,
            } => write!(f, "{}: expected {}, got {}", what, expected, got),
            SsmError::InvalidParams(msg) => write!(f, "invalid scan parameters: {}", msg),
        }
    }
}

impl std::error::Error for SsmError {}
