use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::affinity::AffinityMap;
use crate::dsu::DisjointSet;
use crate::error::PostError;
use crate::seg::Segmentation;

/// Flood candidate: assign `target` to the fragment of `source`.
/// Max-heap order: strongest link first, then lower target flat index,
/// then lower source flat index.
#[derive(Debug, Clone, Copy)]
struct FloodEdge {
    aff: f64,
    target: usize,
    source: usize,
}

impl PartialEq for FloodEdge {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for FloodEdge {}
impl PartialOrd for FloodEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FloodEdge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.aff
            .total_cmp(&other.aff)
            .then_with(|| other.target.cmp(&self.target))
            .then_with(|| other.source.cmp(&self.source))
    }
}

/// Seeded watershed on the affinity lattice. Connected components of
/// edges ≥ `t_hi` become seeds; the rest of the volume is flooded along
/// edges ≥ `t_lo` in descending affinity order. Voxels no flood reaches
/// stay background.
pub fn watershed_fragments(
    aff: &AffinityMap,
    t_hi: f64,
    t_lo: f64,
) -> Result<Segmentation, PostError> {
    for (name, v) in [("t_hi", t_hi), ("t_lo", t_lo)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(PostError::BadThreshold { name, value: v });
        }
    }
    if t_lo > t_hi {
        return Err(PostError::ThresholdOrder { t_hi, t_lo });
    }

    let dims = aff.dims;
    let n = dims.n();
    let mut dsu = DisjointSet::new(n);
    let mut seeded = vec![false; n];
    aff.for_each_edge(|lo, hi, a| {
        if a >= t_hi {
            dsu.union(lo, hi);
            seeded[lo] = true;
            seeded[hi] = true;
        }
    });

    // Provisional labels: seed root + 1 so 0 stays free for background.
    let mut labels = vec![0u64; n];
    for v in 0..n {
        if seeded[v] {
            labels[v] = dsu.find(v) as u64 + 1;
        }
    }

    let mut heap = BinaryHeap::new();
    let push_frontier = |labels: &[u64], heap: &mut BinaryHeap<FloodEdge>, v: usize| {
        let (d, h, w) = dims.coords(v);
        let mut consider = |nb: usize, a: f64| {
            if a >= t_lo && labels[nb] == 0 {
                heap.push(FloodEdge {
                    aff: a,
                    target: nb,
                    source: v,
                });
            }
        };
        if d > 0 {
            consider(dims.flat(d - 1, h, w), aff.get(0, d, h, w));
        }
        if d + 1 < dims.depth {
            consider(dims.flat(d + 1, h, w), aff.get(0, d + 1, h, w));
        }
        if h > 0 {
            consider(dims.flat(d, h - 1, w), aff.get(1, d, h, w));
        }
        if h + 1 < dims.height {
            consider(dims.flat(d, h + 1, w), aff.get(1, d, h + 1, w));
        }
        if w > 0 {
            consider(dims.flat(d, h, w - 1), aff.get(2, d, h, w));
        }
        if w + 1 < dims.width {
            consider(dims.flat(d, h, w + 1), aff.get(2, d, h, w + 1));
        }
    };

    for v in 0..n {
        if labels[v] != 0 {
            push_frontier(&labels, &mut heap, v);
        }
    }
    while let Some(e) = heap.pop() {
        if labels[e.target] != 0 {
            continue;
        }
        labels[e.target] = labels[e.source];
        push_frontier(&labels, &mut heap, e.target);
    }

    let mut seg = Segmentation { dims, labels };
    seg.relabel_sequential();
    Ok(seg)
}
