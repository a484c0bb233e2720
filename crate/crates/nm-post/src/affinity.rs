use nm_tensor::{Dims, Volume};

use crate::error::PostError;
use crate::seg::Segmentation;

/// Per-voxel link strengths to the negative neighbor along each axis:
/// channel 0 pairs (d,h,w) with (d-1,h,w), channel 1 with (h-1), channel 2
/// with (w-1). Entries on the low boundary have no neighbor and stay 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMap {
    pub dims: Dims,
    /// Channel-major, 3 channels.
    pub data: Vec<f64>,
}

impl AffinityMap {
    pub fn new(dims: Dims, data: Vec<f64>) -> Result<AffinityMap, PostError> {
        if data.len() != 3 * dims.n() {
            return Err(PostError::ShapeMismatch {
                expected: format!("{} affinities", 3 * dims.n()),
                got: format!("{}", data.len()),
            });
        }
        for (i, v) in data.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 || *v > 1.0 {
                return Err(PostError::BadAffinity {
                    index: i,
                    value: *v,
                });
            }
        }
        Ok(AffinityMap { dims, data })
    }

    pub fn zeros(dims: Dims) -> AffinityMap {
        AffinityMap {
            dims,
            data: vec![0.0; 3 * dims.n()],
        }
    }

    pub fn from_volume(v: &Volume) -> Result<AffinityMap, PostError> {
        if v.channels != 3 {
            return Err(PostError::ShapeMismatch {
                expected: "3 channels".to_string(),
                got: format!("{} channels", v.channels),
            });
        }
        AffinityMap::new(v.dims, v.data.clone())
    }

    pub fn get(&self, axis: usize, d: usize, h: usize, w: usize) -> f64 {
        self.data[axis * self.dims.n() + self.dims.flat(d, h, w)]
    }

    pub fn set(&mut self, axis: usize, d: usize, h: usize, w: usize, value: f64) {
        let i = axis * self.dims.n() + self.dims.flat(d, h, w);
        self.data[i] = value;
    }

    /// Visit every lattice edge as (lower flat index, higher flat index,
    /// affinity), in storage order of the higher endpoint, axis-major.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        let dims = self.dims;
        for axis in 0..3 {
            let base = axis * dims.n();
            for d in 0..dims.depth {
                for h in 0..dims.height {
                    for w in 0..dims.width {
                        let (pd, ph, pw) = match axis {
                            0 if d > 0 => (d - 1, h, w),
                            1 if h > 0 => (d, h - 1, w),
                            2 if w > 0 => (d, h, w - 1),
                            _ => continue,
                        };
                        let hi = dims.flat(d, h, w);
                        f(dims.flat(pd, ph, pw), hi, self.data[base + hi]);
                    }
                }
            }
        }
    }
}

/// Oracle affinities: 1 where a voxel and its negative neighbor carry the
/// same nonzero label, 0 elsewhere (boundaries included).
pub fn affinity_from_labels(seg: &Segmentation) -> AffinityMap {
    let dims = seg.dims;
    let mut aff = AffinityMap::zeros(dims);
    for d in 0..dims.depth {
        for h in 0..dims.height {
            for w in 0..dims.width {
                let l = seg.get(d, h, w);
                if l == 0 {
                    continue;
                }
                if d > 0 && seg.get(d - 1, h, w) == l {
                    aff.set(0, d, h, w, 1.0);
                }
                if h > 0 && seg.get(d, h - 1, w) == l {
                    aff.set(1, d, h, w, 1.0);
                }
                if w > 0 && seg.get(d, h, w - 1) == l {
                    aff.set(2, d, h, w, 1.0);
                }
            }
        }
    }
    aff
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_label_gives_all_interior_ones() {
        let dims = Dims::new(2, 2, 2);
        let seg = Segmentation::new(dims, vec![5; 8]).unwrap();
        let aff = affinity_from_labels(&seg);
        for d in 0..2 {
            for h in 0..2 {
                for w in 0..2 {
                    assert_eq!(aff.get(0, d, h, w), if d > 0 { 1.0 } else { 0.0 });
                    assert_eq!(aff.get(1, d, h, w), if h > 0 { 1.0 } else { 0.0 });
                    assert_eq!(aff.get(2, d, h, w), if w > 0 { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn background_everywhere_gives_zero_affinity() {
        let seg = Segmentation::zeros(Dims::new(2, 3, 4));
        let aff = affinity_from_labels(&seg);
        assert!(aff.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_label_row_splits_at_boundary() {
        let dims = Dims::new(1, 1, 4);
        let seg = Segmentation::new(dims, vec![1, 1, 2, 2]).unwrap();
        let aff = affinity_from_labels(&seg);
        let xs: Vec<f64> = (0..4).map(|w| aff.get(2, 0, 0, w)).collect();
        assert_eq!(xs, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn out_of_range_values_rejected() {
        let dims = Dims::new(1, 1, 2);
        let mut data = vec![0.0; 6];
        data[3] = 1.5;
        assert!(matches!(
            AffinityMap::new(dims, data),
            Err(PostError::BadAffinity { index: 3, .. })
        ));
    }

    #[test]
    fn edge_walk_visits_each_pair_once() {
        let dims = Dims::new(2, 2, 2);
        let aff = AffinityMap::zeros(dims);
        let mut seen = Vec::new();
        aff.for_each_edge(|lo, hi, _| seen.push((lo, hi)));
        // 3 axes × 4 edges each on a 2×2×2 grid.
        assert_eq!(seen.len(), 12);
        let unique: std::collections::BTreeSet<_> = seen.iter().collect();
        assert_eq!(unique.len(), 12);
        assert!(seen.iter().all(|(lo, hi)| lo < hi));
    }
}
