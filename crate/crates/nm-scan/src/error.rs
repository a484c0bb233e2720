use nm_tensor::Dims;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanError {
    EmptyAxis { axis: &'static str },
    DimMismatch { expected: Dims, got: Dims },
    LengthMismatch { expected: usize, got: usize },
    UnknownVariant(String),
    UnknownMechanism(String),
}

impl std::fmt::Display for ScanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanError::EmptyAxis { axis } => write!(f, "scan order needs a nonzero {} axis", axis),
            ScanError::DimMismatch { expected, got } => {
                write!(f, "scan order built for {} applied to {}", expected, got)
            }
            ScanError::LengthMismatch { expected, got } => {
                write!(f, "sequence length {} does not match order length {}", got, expected)
            }
            ScanError::UnknownVariant(name) => write!(f, "unknown scan variant '{}'", name),
            ScanError::UnknownMechanism(name) => write!(f, "unknown scan mechanism '{}'", name),
        }
    }
}

impl std::error::Error for ScanError {}
