//! Affinity-based instance segmentation: seeded watershed over an affinity
//! lattice, score-ordered region agglomeration, and a greedy multicut
//! heuristic on the region adjacency graph.

mod affinity;
mod dsu;
mod error;
mod graph;
mod multicut;
mod seg;
mod watershed;
mod waterz;

pub use affinity::{affinity_from_labels, AffinityMap};
pub use dsu::DisjointSet;
pub use error::PostError;
pub use graph::{EdgeStats, MergeStat, RegionGraph};
pub use multicut::{gaec_partition, multicut_gaec};
pub use seg::Segmentation;
pub use watershed::watershed_fragments;
pub use waterz::agglomerate_waterz;

/// Watershed seed threshold used when none is given.
pub const DEFAULT_T_HI: f64 = 0.95;
/// Watershed flood threshold used when none is given.
pub const DEFAULT_T_LO: f64 = 0.05;
/// Merge threshold used when none is given.
pub const DEFAULT_THETA: f64 = 0.5;
