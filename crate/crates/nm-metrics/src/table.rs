use std::collections::BTreeMap;

use nm_post::Segmentation;

use crate::error::MetricsError;

/// Sparse joint label counts between a reference and a predicted
/// labeling, with both marginals. Only evaluated voxels contribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// (reference label, predicted label) → voxel count; entries are ≥ 1.
    pub counts: BTreeMap<(u64, u64), u64>,
    pub gt_marginal: BTreeMap<u64, u64>,
    pub pred_marginal: BTreeMap<u64, u64>,
    pub total: u64,
}

/// Count joint label occurrences. With `ignore_background` set (the
/// default in the CLI), voxels whose reference label is 0 are excluded;
/// a predicted 0 participates as an ordinary label.
pub fn contingency(
    gt: &Segmentation,
    pred: &Segmentation,
    ignore_background: bool,
) -> Result<ContingencyTable, MetricsError> {
    if gt.dims != pred.dims {
        return Err(MetricsError::DimMismatch {
            expected: gt.dims.to_string(),
            got: pred.dims.to_string(),
        });
    }
    let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut gt_marginal: BTreeMap<u64, u64> = BTreeMap::new();
    let mut pred_marginal: BTreeMap<u64, u64> = BTreeMap::new();
    let mut total = 0u64;
    for (g, p) in gt.labels.iter().zip(&pred.labels) {
        if ignore_background && *g == 0 {
            continue;
        }
        *counts.entry((*g, *p)).or_insert(0) += 1;
        *gt_marginal.entry(*g).or_insert(0) += 1;
        *pred_marginal.entry(*p).or_insert(0) += 1;
        total += 1;
    }
    Ok(ContingencyTable {
        counts,
        gt_marginal,
        pred_marginal,
        total,
    })
}
