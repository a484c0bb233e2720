use nm_scan::ScanError;
use nm_ssm::SsmError;
use nm_tensor::TensorError;

#[derive(Debug)]
pub enum NetError {
    InvalidConfig(String),
    ShapeMismatch {
        what: &'static str,
        expected: String,
        got: String,
    },
    ExtentNotDivisible {
        stage: usize,
        axis: &'static str,
        extent: usize,
        factor: usize,
    },
    Tensor(TensorError),
    Scan(ScanError),
    Ssm(SsmError),
    Checkpoint(crate::checkpoint::CheckpointError),
}

impl std::fmt::Display for NetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetError::InvalidConfig(msg) => write!(f, "invalid model config: {}", msg),
            NetError::ShapeMismatch {
                what,
                expected,
                got,
            } => write!(f, "{}: expected {}, got {}", what, expected, got),
            NetError::ExtentNotDivisible {
                stage,
                axis,
                extent,
                factor,
            } => write!(
                f,
                "stage {}: {} extent {} not divisible by downsample factor {}",
                stage, axis, extent, factor
            ),
            NetError::Tensor(e) => write!(f, "{}", e),
            NetError::Scan(e) => write!(f, "{}", e),
            NetError::Ssm(e) => write!(f, "{}", e),
            NetError::Checkpoint(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for NetError {}

impl From<TensorError> for NetError {
    fn from(e: TensorError) -> Self {
        NetError::Tensor(e)
    }
}

impl From<ScanError> for NetError {
    fn from(e: ScanError) -> Self {
        NetError::Scan(e)
    }
}

impl From<SsmError> for NetError {
    fn from(e: SsmError) -> Self {
        NetError::Ssm(e)
    }
}
