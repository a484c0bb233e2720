use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::affinity::AffinityMap;
use crate::dsu::DisjointSet;
use crate::error::PostError;
use crate::graph::{ordered, MergeStat, RegionGraph};
use crate::seg::Segmentation;
use crate::waterz::ScoredEdge;

/// Probabilities are clipped here before the logit so weights stay finite.
pub const LOGIT_CLIP: f64 = 1e-6;

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Greedy additive edge contraction. Repeatedly contracts the strictly
/// positive edge of largest weight, summing parallel edges; stops when no
/// positive edge remains. Returns the root node of every node id in
/// 0..=max_node; untouched ids root to themselves. Same lazy-heap
/// discipline as agglomeration: stale entries are discarded on pop.
pub fn gaec_partition(weights: &BTreeMap<(u64, u64), f64>, max_node: u64) -> Vec<u64> {
    let mut dsu = DisjointSet::new(max_node as usize + 1);
    let mut w: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    let mut nbs: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    for ((a, b), wt) in weights {
        assert!(wt.is_finite(), "edge weight must be finite");
        let key = ordered(*a, *b);
        let entry = w.entry(key).or_insert(0.0);
        *entry += wt;
        nbs.entry(key.0).or_default().insert(key.1);
        nbs.entry(key.1).or_default().insert(key.0);
    }
    for ((a, b), wt) in &w {
        heap.push(ScoredEdge {
            score: *wt,
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
        let Some(current) = w.get(&key).copied() else {
            continue;
        };
        if current.to_bits() != e.score.to_bits() {
            continue;
        }
        if current <= 0.0 {
            break;
        }

        let keep = dsu.union(ra as usize, rb as usize) as u64;
        let gone = if keep == ra { rb } else { ra };
        w.remove(&key);
        if let Some(s) = nbs.get_mut(&keep) {
            s.remove(&gone);
        }
        let gone_nbs = nbs.remove(&gone).unwrap_or_default();
        for nb in gone_nbs {
            if nb == keep {
                continue;
            }
            let moved = w.remove(&ordered(gone, nb)).expect("edge tracked");
            if let Some(s) = nbs.get_mut(&nb) {
                s.remove(&gone);
                s.insert(keep);
            }
            nbs.entry(keep).or_default().insert(nb);
            let new_key = ordered(keep, nb);
            let entry = w.entry(new_key).or_insert(0.0);
            *entry += moved;
            heap.push(ScoredEdge {
                score: *entry,
                a: new_key.0,
                b: new_key.1,
            });
        }
    }

    (0..=max_node).map(|i| dsu.find(i as usize) as u64).collect()
}

/// Partition fragments by contracting the region graph under signed
/// weights logit(mean boundary affinity) − logit(theta).
pub fn multicut_gaec(
    frags: &Segmentation,
    aff: &AffinityMap,
    theta: f64,
) -> Result<Segmentation, PostError> {
    if !theta.is_finite() || theta <= 0.0 || theta >= 1.0 {
        return Err(PostError::BadThreshold {
            name: "theta",
            value: theta,
        });
    }
    let rag = RegionGraph::from_segmentation(frags, aff)?;
    let bias = logit(theta);
    let mut weights = BTreeMap::new();
    for ((a, b), st) in &rag.edges {
        let p = st
            .score(MergeStat::Mean)
            .clamp(LOGIT_CLIP, 1.0 - LOGIT_CLIP);
        weights.insert((*a, *b), logit(p) - bias);
    }
    let max_label = frags.labels.iter().copied().max().unwrap_or(0);
    let roots = gaec_partition(&weights, max_label);

    let mut out = frags.clone();
    for l in out.labels.iter_mut() {
        if *l != 0 {
            *l = roots[*l as usize];
        }
    }
    out.relabel_sequential();
    Ok(out)
}
