//! Dense f64 tensor substrate for the segmentation pipeline: volumes and
//! channel sequences, zero-padded convolutions, instance normalization,
//! pointwise activations, and seeded parameter initialization.
//!
//! Everything here is deterministic: no global RNG, no thread-count-dependent
//! reduction orders.

mod conv;
mod error;
mod init;
mod norm;
mod pointwise;
mod volume;

pub use conv::{conv1d, conv3d, ConvSpec1d, ConvSpec3d};
pub use error::TensorError;
pub use init::ParamRng;
pub use norm::{instance_norm_seq, instance_norm_volume, InstanceNorm, DEFAULT_NORM_EPS};
pub use pointwise::{pointwise, pointwise_seq, relu, sigmoid, silu, softplus, Activation};
pub use volume::{Dims, Resolution, Sequence, Volume};
