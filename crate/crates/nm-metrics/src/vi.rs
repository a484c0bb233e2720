use crate::error::MetricsError;
use crate::table::ContingencyTable;

/// Sum in ascending order so the result depends only on the multiset of
/// terms, not on label numbering or table iteration order.
fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// Conditional-entropy decomposition of the disagreement, natural log:
/// the split term is H(pred | ref), the merge term H(ref | pred), and the
/// total their sum. Empty cells never appear in the sparse table, which
/// realizes the 0·ln 0 ≡ 0 convention.
pub fn variation_of_information(
    tab: &ContingencyTable,
) -> Result<(f64, f64, f64), MetricsError> {
    if tab.total == 0 {
        return Err(MetricsError::EmptyTable);
    }
    let n = tab.total as f64;
    let mut split_terms = Vec::with_capacity(tab.counts.len());
    let mut merge_terms = Vec::with_capacity(tab.counts.len());
    for ((i, j), c) in &tab.counts {
        let nij = *c as f64;
        let ni = tab.gt_marginal[i] as f64;
        let nj = tab.pred_marginal[j] as f64;
        split_terms.push((nij / n) * (nij / ni).ln());
        merge_terms.push((nij / n) * (nij / nj).ln());
    }
    // `0.0 - x` instead of `-x`: keeps an exactly-zero entropy at +0.0.
    let vi_split = 0.0 - canonical_sum(split_terms);
    let vi_merge = 0.0 - canonical_sum(merge_terms);
    Ok((vi_split, vi_merge, vi_split + vi_merge))
}
