use crate::error::MetricsError;
use crate::table::ContingencyTable;

/// One minus the F-score of Rand precision/recall over ordered voxel
/// pairs: p = Σn_ij²/Σn_·j², r = Σn_ij²/Σn_i·². Squared sums are exact
/// 128-bit integers, so the result is independent of label numbering.
pub fn adapted_rand_error(tab: &ContingencyTable) -> Result<f64, MetricsError> {
    if tab.total <= 1 {
        return Err(MetricsError::DegenerateTable { n: tab.total });
    }
    let sq = |v: u64| (v as u128) * (v as u128);
    let joint: u128 = tab.counts.values().map(|c| sq(*c)).sum();
    let gt_sq: u128 = tab.gt_marginal.values().map(|c| sq(*c)).sum();
    let pred_sq: u128 = tab.pred_marginal.values().map(|c| sq(*c)).sum();
    let p = joint as f64 / pred_sq as f64;
    let r = joint as f64 / gt_sq as f64;
    Ok(1.0 - 2.0 * p * r / (p + r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::contingency;
    use nm_post::Segmentation;
    use nm_tensor::Dims;
    use rand::{Rng, SeedableRng};

    fn seg(dims: Dims, labels: Vec<u64>) -> Segmentation {
        Segmentation::new(dims, labels).unwrap()
    }

    #[test]
    fn identical_segmentations_score_zero() {
        let dims = Dims::new(1, 2, 4);
        let a = seg(dims, vec![1, 1, 2, 2, 3, 3, 4, 4]);
        let t = contingency(&a, &a, true).unwrap();
        assert_eq!(adapted_rand_error(&t).unwrap(), 0.0);
    }

    #[test]
    fn even_split_scores_one_third() {
        let dims = Dims::new(1, 1, 4);
        let gt = seg(dims, vec![1, 1, 1, 1]);
        let pred = seg(dims, vec![7, 7, 9, 9]);
        let t = contingency(&gt, &pred, true).unwrap();
        let e = adapted_rand_error(&t).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stays_in_unit_interval_and_matches_pair_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(91);
        for _ in 0..20 {
            let dims = Dims::new(1, 8, rng.gen_range(4..16));
            let ga: Vec<u64> = (0..dims.n()).map(|_| rng.gen_range(1..5)).collect();
            let pa: Vec<u64> = (0..dims.n()).map(|_| rng.gen_range(0..5)).collect();
            let t = contingency(&seg(dims, ga.clone()), &seg(dims, pa.clone()), true).unwrap();
            let e = adapted_rand_error(&t).unwrap();
            assert!((0.0..=1.0).contains(&e), "arand {} out of range", e);

            // Ordered-pair brute force, self-pairs included.
            let n = ga.len();
            let (mut both, mut in_gt, mut in_pred) = (0u64, 0u64, 0u64);
            for a in 0..n {
                for b in 0..n {
                    let same_g = ga[a] == ga[b];
                    let same_p = pa[a] == pa[b];
                    if same_g {
                        in_gt += 1;
                    }
                    if same_p {
                        in_pred += 1;
                    }
                    if same_g && same_p {
                        both += 1;
                    }
                }
            }
            let p = both as f64 / in_pred as f64;
            let r = both as f64 / in_gt as f64;
            let want = 1.0 - 2.0 * p * r / (p + r);
            assert!((e - want).abs() <= 1e-12, "got {}, oracle {}", e, want);
        }
    }

    #[test]
    fn relabeling_is_bit_exact() {
        let dims = Dims::new(2, 4, 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let ga: Vec<u64> = (0..dims.n()).map(|_| rng.gen_range(1..4)).collect();
        let pa: Vec<u64> = (0..dims.n()).map(|_| rng.gen_range(1..6)).collect();
        let base = adapted_rand_error(
            &contingency(&seg(dims, ga.clone()), &seg(dims, pa.clone()), true).unwrap(),
        )
        .unwrap();
        let mapped = adapted_rand_error(
            &contingency(
                &seg(dims, ga.iter().map(|l| l * 1009 + 3).collect()),
                &seg(dims, pa.iter().map(|l| l * 7 + 40).collect()),
                true,
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(base.to_bits(), mapped.to_bits());
    }

    #[test]
    fn single_voxel_is_degenerate() {
        let dims = Dims::new(1, 1, 1);
        let a = seg(dims, vec![1]);
        let t = contingency(&a, &a, true).unwrap();
        assert_eq!(
            adapted_rand_error(&t),
            Err(MetricsError::DegenerateTable { n: 1 })
        );
    }
}
