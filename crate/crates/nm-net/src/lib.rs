//! Affinity prediction network: a strip-pooled local gate and a
//! resolution-weighted global scan mixer fused by cross-modulation, stacked
//! into a small U-shaped encoder–decoder that maps a grayscale volume to a
//! 3-channel affinity map.

mod bdfe;
mod cfi;
mod checkpoint;
mod error;
mod model;
mod mpfi;
mod prior;
mod scfe;
mod strip;

pub use bdfe::{bdfe_forward, BdfeOutput, BdfeParams, GateVectors};
pub use cfi::cfi_forward;
pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, TensorEntry};
pub use error::NetError;
pub use model::{nearest_upsample, DecoderStage, EncoderStage, Model, ModelConfig};
pub use mpfi::{mpfi_forward, MpfiIntermediates, MpfiParams};
pub use prior::{compute_lambdas, ResolutionPrior, DEFAULT_ALPHA, DEFAULT_BETA};
pub use scfe::scfe_forward;
pub use strip::{strip_pool, StripFeatures};
