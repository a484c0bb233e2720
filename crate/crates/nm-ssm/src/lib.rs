//! Selective state-space mixer: an input-dependent discretized linear
//! recurrence over 1D sequences. Ships a sequential reference kernel, a
//! chunked variant with identical contract (per-chunk affine summaries
//! combined left-to-right, then a parallel replay), and an analytic
//! backward pass checked against finite differences.

mod backward;
mod block;
mod error;
mod params;
mod scan;

pub use backward::{selective_scan_backward, SsmGradients};
pub use block::{mamba_block, MambaBlockParams};
pub use error::SsmError;
pub use params::{ConstProjection, ScanState, SsmParams};
pub use scan::{selective_scan_chunked, selective_scan_seq};
