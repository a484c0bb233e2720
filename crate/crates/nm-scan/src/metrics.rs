use crate::order::ScanOrder;

/// Locality diagnostics of one order. A jump is the Manhattan distance
/// between consecutively visited voxels; `adjacent_fraction` is the share of
/// jumps equal to 1. A single-voxel order has no jumps and reports
/// mean 0 / p95 0 / adjacent_fraction 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalityMetrics {
    pub mean_jump: f64,
    pub p95_jump: f64,
    pub adjacent_fraction: f64,
}

pub fn locality_metrics(order: &ScanOrder) -> LocalityMetrics {
    let dims = order.dims;
    let mut jumps: Vec<usize> = order
        .perm
        .windows(2)
        .map(|pair| {
            let (d0, h0, w0) = dims.coords(pair[0]);
            let (d1, h1, w1) = dims.coords(pair[1]);
            d0.abs_diff(d1) + h0.abs_diff(h1) + w0.abs_diff(w1)
        })
        .collect();
    if jumps.is_empty() {
        return LocalityMetrics {
            mean_jump: 0.0,
            p95_jump: 0.0,
            adjacent_fraction: 1.0,
        };
    }
    let n = jumps.len();
    let sum: usize = jumps.iter().sum();
    let adjacent = jumps.iter().filter(|&&j| j == 1).count();
    jumps.sort_unstable();
    // Nearest-rank percentile: smallest value with rank ≥ 0.95·n.
    let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
    LocalityMetrics {
        mean_jump: sum as f64 / n as f64,
        p95_jump: jumps[rank - 1] as f64,
        adjacent_fraction: adjacent as f64 / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{build_order, ScanVariant};
    use nm_tensor::Dims;

    #[test]
    fn straight_line_is_all_unit_jumps() {
        let o = build_order(&ScanVariant::TransversePrimary, Dims::new(1, 1, 8)).unwrap();
        let m = locality_metrics(&o);
        assert_eq!(m.mean_jump, 1.0);
        assert_eq!(m.p95_jump, 1.0);
        assert_eq!(m.adjacent_fraction, 1.0);
    }

    #[test]
    fn raster_wraps_cost_two() {
        // (1,2,2): visits 0,1,2,3 → coords jumps 1, 2 (row wrap), 1.
        let o = build_order(&ScanVariant::TransversePrimary, Dims::new(1, 2, 2)).unwrap();
        let m = locality_metrics(&o);
        assert!((m.mean_jump - 4.0 / 3.0).abs() < 1e-15);
        assert!((m.adjacent_fraction - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.p95_jump, 2.0);
    }

    #[test]
    fn hilbert_four_cube_is_fully_adjacent() {
        let o = build_order(&ScanVariant::Hilbert, Dims::new(4, 4, 4)).unwrap();
        let m = locality_metrics(&o);
        assert_eq!(m.adjacent_fraction, 1.0);
        assert_eq!(m.mean_jump, 1.0);
    }

    #[test]
    fn single_voxel_has_vacuous_metrics() {
        let o = build_order(&ScanVariant::Hilbert, Dims::new(1, 1, 1)).unwrap();
        let m = locality_metrics(&o);
        assert_eq!(m.mean_jump, 0.0);
        assert_eq!(m.adjacent_fraction, 1.0);
    }
}
