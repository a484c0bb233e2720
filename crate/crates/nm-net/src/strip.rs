use nm_tensor::{Sequence, Volume};

/// Per-axis plane means: `y_d[c][i]` averages channel `c` over the (h, w)
/// plane at depth `i`, and likewise for the other two axes.
#[derive(Debug, Clone, PartialEq)]
pub struct StripFeatures {
    pub y_d: Sequence,
    pub y_h: Sequence,
    pub y_w: Sequence,
}

pub fn strip_pool(x: &Volume) -> StripFeatures {
    let dims = x.dims;
    let (nd, nh, nw) = (dims.depth, dims.height, dims.width);
    let mut y_d = Sequence::zeros(x.channels, nd);
    let mut y_h = Sequence::zeros(x.channels, nh);
    let mut y_w = Sequence::zeros(x.channels, nw);
    for c in 0..x.channels {
        let ch = x.channel(c);
        for d in 0..nd {
            for h in 0..nh {
                let row = &ch[dims.flat(d, h, 0)..dims.flat(d, h, 0) + nw];
                for (w, v) in row.iter().enumerate() {
                    y_d.data[c * nd + d] += v;
                    y_h.data[c * nh + h] += v;
                    y_w.data[c * nw + w] += v;
                }
            }
        }
        for v in &mut y_d.data[c * nd..(c + 1) * nd] {
            *v /= (nh * nw) as f64;
        }
        for v in &mut y_h.data[c * nh..(c + 1) * nh] {
            *v /= (nd * nw) as f64;
        }
        for v in &mut y_w.data[c * nw..(c + 1) * nw] {
            *v /= (nd * nh) as f64;
        }
    }
    StripFeatures { y_d, y_h, y_w }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nm_tensor::Dims;

    #[test]
    fn constant_volume_pools_to_constants() {
        let x = Volume::from_fn(1, Dims::new(2, 2, 2), |_, _, _, _| 1.0);
        let s = strip_pool(&x);
        assert_eq!(s.y_d.data, vec![1.0, 1.0]);
        assert_eq!(s.y_h.data, vec![1.0, 1.0]);
        assert_eq!(s.y_w.data, vec![1.0, 1.0]);
    }

    #[test]
    fn storage_order_ramp_has_known_depth_means() {
        let x = Volume::from_fn(1, Dims::new(2, 2, 2), |_, d, h, w| (d * 4 + h * 2 + w) as f64);
        let s = strip_pool(&x);
        assert_eq!(s.y_d.data, vec![1.5, 5.5]);
    }

    #[test]
    fn depth_ramp_pools_by_symmetry() {
        let x = Volume::from_fn(1, Dims::new(3, 4, 5), |_, d, _, _| d as f64);
        let s = strip_pool(&x);
        assert_eq!(s.y_d.data, vec![0.0, 1.0, 2.0]);
        assert!(s.y_h.data.iter().all(|v| (*v - 1.0).abs() < 1e-12));
        assert!(s.y_w.data.iter().all(|v| (*v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn matches_naive_triple_loop_on_random_volumes() {
        for seed in 0..50usize {
            let dims = Dims::new(1 + seed % 4, 2 + seed % 3, 1 + (seed / 2) % 5);
            let x = Volume::from_fn(2, dims, |c, d, h, w| {
                ((seed * 31 + c * 17 + d * 7 + h * 3 + w) % 23) as f64 * 0.25 - 2.0
            });
            let s = strip_pool(&x);
            for c in 0..2 {
                for d in 0..dims.depth {
                    let mut acc = 0.0;
                    for h in 0..dims.height {
                        for w in 0..dims.width {
                            acc += x.get(c, d, h, w);
                        }
                    }
                    let mean = acc / (dims.height * dims.width) as f64;
                    assert!((s.y_d.get(c, d) - mean).abs() <= 1e-12);
                }
                for w in 0..dims.width {
                    let mut acc = 0.0;
                    for d in 0..dims.depth {
                        for h in 0..dims.height {
                            acc += x.get(c, d, h, w);
                        }
                    }
                    let mean = acc / (dims.depth * dims.height) as f64;
                    assert!((s.y_w.get(c, w) - mean).abs() <= 1e-12);
                }
            }
        }
    }
}
