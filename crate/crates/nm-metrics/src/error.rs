use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    DimMismatch { expected: String, got: String },
    /// No voxels were evaluated (everything excluded or empty volume).
    EmptyTable,
    /// Fewer than two evaluated voxels; pair statistics are undefined.
    DegenerateTable { n: u64 },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::DimMismatch { expected, got } => {
                write!(f, "segmentation dims differ: {} vs {}", expected, got)
            }
            MetricsError::EmptyTable => write!(f, "no voxels to evaluate"),
            MetricsError::DegenerateTable { n } => {
                write!(f, "{} evaluated voxel(s); need at least 2", n)
            }
        }
    }
}

impl std::error::Error for MetricsError {}
