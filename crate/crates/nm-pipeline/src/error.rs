use std::fmt;
use std::path::PathBuf;

/// Pipeline-level failures. Each category maps to a stable process exit
/// code and a machine-readable stderr record.
#[derive(Debug)]
pub enum PipelineError {
    MissingFile { path: PathBuf },
    MalformedHeader { path: PathBuf, detail: String },
    Config { detail: String },
    Domain { detail: String },
    Io { detail: String },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::MissingFile { .. } => 3,
            PipelineError::MalformedHeader { .. } => 4,
            PipelineError::Config { .. } => 5,
            PipelineError::Domain { .. } => 6,
            PipelineError::Io { .. } => 6,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::MissingFile { .. } => "missing-file",
            PipelineError::MalformedHeader { .. } => "malformed-header",
            PipelineError::Config { .. } => "config",
            PipelineError::Domain { .. } => "domain",
            PipelineError::Io { .. } => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record_json(&self) -> String {
        let msg = self.to_string();
        serde_json::json!({
            "error": self.kind(),
            "code": self.exit_code(),
            "message": msg,
        })
        .to_string()
    }

    pub fn from_io(e: std::io::Error, path: &std::path::Path) -> PipelineError {
        if e.kind() == std::io::ErrorKind::NotFound {
            PipelineError::MissingFile {
                path: path.to_path_buf(),
            }
        } else {
            PipelineError::Io {
                detail: format!("{}: {}", path.display(), e),
            }
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::MissingFile { path } => {
                write!(f, "file not found: {}", path.display())
            }
            PipelineError::MalformedHeader { path, detail } => {
                write!(f, "malformed header {}: {}", path.display(), detail)
            }
            PipelineError::Config { detail } => write!(f, "invalid configuration: {}", detail),
            PipelineError::Domain { detail } => write!(f, "{}", detail),
            PipelineError::Io { detail } => write!(f, "io error: {}", detail),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<nm_net::NetError> for PipelineError {
    fn from(e: nm_net::NetError) -> Self {
        PipelineError::Domain {
            detail: e.to_string(),
        }
    }
}

impl From<nm_post::PostError> for PipelineError {
    fn from(e: nm_post::PostError) -> Self {
        PipelineError::Domain {
            detail: e.to_string(),
        }
    }
}

impl From<nm_metrics::MetricsError> for PipelineError {
    fn from(e: nm_metrics::MetricsError) -> Self {
        PipelineError::Domain {
            detail: e.to_string(),
        }
    }
}

impl From<nm_scan::ScanError> for PipelineError {
    fn from(e: nm_scan::ScanError) -> Self {
        PipelineError::Domain {
            detail: e.to_string(),
        }
    }
}

impl From<nm_tensor::TensorError> for PipelineError {
    fn from(e: nm_tensor::TensorError) -> Self {
        PipelineError::Domain {
            detail: e.to_string(),
        }
    }
}

impl From<nm_net::CheckpointError> for PipelineError {
    fn from(e: nm_net::CheckpointError) -> Self {
        PipelineError::Domain {
            detail: e.to_string(),
        }
    }
}
