//! End-to-end plumbing for affinity-based neuron instance segmentation:
//! volume files with JSON sidecar headers, overlap tiling with uniform
//! blending, tiled prediction, synthetic ground-truth generation,
//! watershed + agglomeration, and evaluation.

pub mod config;
pub mod error;
pub mod io;
pub mod predict;
pub mod run;
pub mod synth;
pub mod tile;

pub use config::PipelineConfig;
pub use error::PipelineError;
pub use io::{
    read_f64_volume, read_label_volume, volume_paths, write_f64_volume, write_label_volume,
};
pub use predict::predict_tiled;
pub use run::{evaluate, oracle_segment, segment_affinities, EvalRecord, SegMethod};
pub use synth::gen_synth;
pub use tile::{tile_plan, TilePlan};
