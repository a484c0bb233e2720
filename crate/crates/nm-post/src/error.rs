use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum PostError {
    /// A threshold is outside its legal range or ordered wrongly.
    BadThreshold { name: &'static str, value: f64 },
    ThresholdOrder { t_hi: f64, t_lo: f64 },
    /// An affinity value is outside [0,1] or not finite.
    BadAffinity { index: usize, value: f64 },
    ShapeMismatch { expected: String, got: String },
}

impl fmt::Display for PostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PostError::BadThreshold { name, value } => {
                write!(f, "threshold {} = {} out of range", name, value)
            }
            PostError::ThresholdOrder { t_hi, t_lo } => {
                write!(f, "seed threshold {} below flood threshold {}", t_hi, t_lo)
            }
            PostError::BadAffinity { index, value } => {
                write!(f, "affinity at flat index {} is {}, not in [0,1]", index, value)
            }
            PostError::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {}, got {}", expected, got)
            }
        }
    }
}

impl std::error::Error for PostError {}
