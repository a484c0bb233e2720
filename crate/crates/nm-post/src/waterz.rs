use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::affinity::AffinityMap;
use crate::dsu::DisjointSet;
use crate::error::PostError;
use crate::graph::{ordered, MergeStat, RegionGraph};
use crate::seg::Segmentation;

/// Max-heap entry; ties broken toward the smaller label pair so merge
/// order never depends on hash or insertion order.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScoredEdge {
    pub score: f64,
    pub a: u64,
    pub b: u64,
}

impl PartialEq for ScoredEdge {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ScoredEdge {}
impl PartialOrd for ScoredEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ScoredEdge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

/// Score-ordered region merging with lazy rescoring. Every live edge
/// always has one heap entry carrying its current score (pushed at build
/// time and again whenever its stats change); entries whose score no
/// longer matches are discarded on pop. Merging stops the first time an
/// accurate top entry falls below `theta`.
pub fn agglomerate_waterz(
    frags: &Segmentation,
    aff: &AffinityMap,
    theta: f64,
    stat: MergeStat,
) -> Result<Segmentation, PostError> {
    if !theta.is_finite() || !(0.0..=1.0).contains(&theta) {
        return Err(PostError::BadThreshold {
            name: "theta",
            value: theta,
        });
    }
    let mut rag = RegionGraph::from_segmentation(frags, aff)?;
    let max_label = frags.labels.iter().copied().max().unwrap_or(0);
    let mut dsu = DisjointSet::new(max_label as usize + 1);

    let mut heap = BinaryHeap::new();
    for ((a, b), st) in &rag.edges {
        heap.push(ScoredEdge {
            score: st.score(stat),
            a: *a,
            b: *b,
        });
    }

    while let Some(e) = heap.pop() {
        let ra = dsu.find(e.a as usize) as u64;
        let rb = dsu.find(e.b as usize) as u64;
        if ra == rb {
            continue;
        }
        let key = ordered(ra, rb);
        let Some(st) = rag.edges.get(&key) else {
            continue;
        };
        let current = st.score(stat);
        if current.to_bits() != e.score.to_bits() {
            continue;
        }
        if current < theta {
            break;
        }

        let keep = dsu.union(ra as usize, rb as usize) as u64;
        let gone = if keep == ra { rb } else { ra };
        rag.edges.remove(&key);
        if let Some(s) = rag.neighbors.get_mut(&keep) {
            s.remove(&gone);
        }
        let gone_nbs = rag.neighbors.remove(&gone).unwrap_or_default();
        for nb in gone_nbs {
            if nb == keep {
                continue;
            }
            let moved = rag.edges.remove(&ordered(gone, nb)).expect("edge tracked");
            if let Some(s) = rag.neighbors.get_mut(&nb) {
                s.remove(&gone);
                s.insert(keep);
            }
            rag.neighbors.entry(keep).or_default().insert(nb);
            let new_key = ordered(keep, nb);
            let entry = rag.edges.entry(new_key).or_default();
            entry.combine(moved);
            heap.push(ScoredEdge {
                score: entry.score(stat),
                a: new_key.0,
                b: new_key.1,
            });
        }
    }

    let mut out = frags.clone();
    for l in out.labels.iter_mut() {
        if *l != 0 {
            *l = dsu.find(*l as usize) as u64;
        }
    }
    out.relabel_sequential();
    Ok(out)
}
