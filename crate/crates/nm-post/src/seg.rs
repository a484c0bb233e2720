use nm_tensor::Dims;
use std::collections::BTreeSet;

use crate::error::PostError;

/// Instance labeling of a voxel grid. Label 0 is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub dims: Dims,
    pub labels: Vec<u64>,
}

impl Segmentation {
    pub fn new(dims: Dims, labels: Vec<u64>) -> Result<Segmentation, PostError> {
        if labels.len() != dims.n() {
            return Err(PostError::ShapeMismatch {
                expected: format!("{} voxels", dims.n()),
                got: format!("{} labels", labels.len()),
            });
        }
        Ok(Segmentation { dims, labels })
    }

    pub fn zeros(dims: Dims) -> Segmentation {
        Segmentation {
            dims,
            labels: vec![0; dims.n()],
        }
    }

    pub fn get(&self, d: usize, h: usize, w: usize) -> u64 {
        self.labels[self.dims.flat(d, h, w)]
    }

    pub fn set(&mut self, d: usize, h: usize, w: usize, label: u64) {
        let i = self.dims.flat(d, h, w);
        self.labels[i] = label;
    }

    /// Count of distinct nonzero labels.
    pub fn num_segments(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| **l != 0)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Renumber nonzero labels to 1..=K in order of first appearance in
    /// storage order; 0 stays 0.
    pub fn relabel_sequential(&mut self) {
        let mut next = 1u64;
        let mut map = std::collections::HashMap::new();
        for l in self.labels.iter_mut() {
            if *l == 0 {
                continue;
            }
            let e = map.entry(*l).or_insert_with(|| {
                let v = next;
                next += 1;
                v
            });
            *l = *e;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabel_orders_by_first_appearance() {
        let dims = Dims::new(1, 1, 6);
        let mut s = Segmentation::new(dims, vec![7, 7, 0, 3, 7, 3]).unwrap();
        s.relabel_sequential();
        assert_eq!(s.labels, vec![1, 1, 0, 2, 1, 2]);
        assert_eq!(s.num_segments(), 2);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(Segmentation::new(Dims::new(1, 2, 2), vec![0, 1]).is_err());
    }
}
