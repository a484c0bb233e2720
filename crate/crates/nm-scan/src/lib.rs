//! 3D→1D serialization orders for the global mixer: plane-first and
//! axis-first rasters, their crossing and reversed companions, and a
//! generalized Hilbert order, plus locality diagnostics and a registry of
//! named scan mechanisms (branch bundles with orientation weights).

mod error;
mod hilbert;
mod mechanism;
mod metrics;
mod order;

pub use error::ScanError;
pub use hilbert::hilbert_order;
pub use mechanism::{
    BranchWeight, MechanismRegistry, ScanBranch, ScanMechanism, DEFAULT_MECHANISM,
};
pub use metrics::{locality_metrics, LocalityMetrics};
pub use order::{build_order, flatten, unflatten, ScanOrder, ScanSequences, ScanVariant};
