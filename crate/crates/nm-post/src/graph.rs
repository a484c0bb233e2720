use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use crate::affinity::AffinityMap;
use crate::error::PostError;
use crate::seg::Segmentation;

/// Boundary evidence between two fragments. Combining two edges keeps
/// every boundary value, so merge scores stay exact after rekeying.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeStats {
    pub sum: f64,
    pub count: usize,
    pub values: Vec<f64>,
}

impl EdgeStats {
    pub fn push(&mut self, v: f64) {
        self.sum += v;
        self.count += 1;
        self.values.push(v);
    }

    pub fn combine(&mut self, other: EdgeStats) {
        self.sum += other.sum;
        self.count += other.count;
        self.values.extend(other.values);
    }

    pub fn score(&self, stat: MergeStat) -> f64 {
        match stat {
            MergeStat::Mean => self.sum / self.count as f64,
            MergeStat::Quantile75 => {
                let mut v = self.values.clone();
                v.sort_unstable_by(f64::total_cmp);
                // Nearest-rank 75th percentile.
                let idx = ((0.75 * v.len() as f64).ceil() as usize).clamp(1, v.len());
                v[idx - 1]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeStat {
    Mean,
    Quantile75,
}

impl Default for MergeStat {
    fn default() -> Self {
        MergeStat::Mean
    }
}

impl std::fmt::Display for MergeStat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MergeStat::Mean => write!(f, "mean"),
            MergeStat::Quantile75 => write!(f, "quantile75"),
        }
    }
}

impl FromStr for MergeStat {
    type Err = PostError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(MergeStat::Mean),
            "quantile75" | "q75" => Ok(MergeStat::Quantile75),
            _ => Err(PostError::ShapeMismatch {
                expected: "mean | quantile75".to_string(),
                got: s.to_string(),
            }),
        }
    }
}

/// Adjacency between nonzero fragments with per-pair boundary stats.
/// Keys are (smaller label, larger label).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionGraph {
    pub edges: BTreeMap<(u64, u64), EdgeStats>,
    pub neighbors: BTreeMap<u64, BTreeSet<u64>>,
}

pub(crate) fn ordered(a: u64, b: u64) -> (u64, u64) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl RegionGraph {
    pub fn from_segmentation(seg: &Segmentation, aff: &AffinityMap) -> Result<RegionGraph, PostError> {
        if seg.dims != aff.dims {
            return Err(PostError::ShapeMismatch {
                expected: seg.dims.to_string(),
                got: aff.dims.to_string(),
            });
        }
        let mut g = RegionGraph::default();
        aff.for_each_edge(|lo, hi, a| {
            let (la, lb) = (seg.labels[lo], seg.labels[hi]);
            if la == 0 || lb == 0 || la == lb {
                return;
            }
            let key = ordered(la, lb);
            g.edges.entry(key).or_default().push(a);
            g.neighbors.entry(key.0).or_default().insert(key.1);
            g.neighbors.entry(key.1).or_default().insert(key.0);
        });
        Ok(g)
    }
}
