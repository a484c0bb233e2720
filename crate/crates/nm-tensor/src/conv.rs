use rayon::prelude::*;

use crate::error::TensorError;
use crate::init::ParamRng;
use crate::volume::{Dims, Sequence, Volume};

/// 3-D convolution parameters. Kernels must have odd extents; padding is
/// implicit zero-padding of `(k-1)/2` per axis, so stride 1 preserves shape
/// and stride `s` maps extent `n` to `ceil(n/s)`.
///
/// Weight layout: `[out][in][kd][kh][kw]`, row-major. One bias per output
/// channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvSpec3d {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: (usize, usize, usize),
    pub stride: (usize, usize, usize),
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvSpec3d {
    pub fn new(
        in_channels: usize,
        out_channels: usize,
        kernel: (usize, usize, usize),
        stride: (usize, usize, usize),
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, TensorError> {
        if in_channels == 0 || out_channels == 0 {
            return Err(TensorError::InvalidSpec(
                "conv3d channel counts must be nonzero".to_string(),
            ));
        }
        let (kd, kh, kw) = kernel;
        if kd % 2 == 0 || kh % 2 == 0 || kw % 2 == 0 || kd == 0 || kh == 0 || kw == 0 {
            return Err(TensorError::InvalidSpec(format!(
                "conv3d kernel extents must be odd, got {}x{}x{}",
                kd, kh, kw
            )));
        }
        let (sd, sh, sw) = stride;
        if sd == 0 || sh == 0 || sw == 0 {
            return Err(TensorError::InvalidSpec(
                "conv3d stride must be nonzero".to_string(),
            ));
        }
        let n_w = out_channels * in_channels * kd * kh * kw;
        if weights.len() != n_w {
            return Err(TensorError::ShapeMismatch {
                axis: "conv3d weights",
                expected: n_w,
                got: weights.len(),
            });
        }
        if bias.len() != out_channels {
            return Err(TensorError::ShapeMismatch {
                axis: "conv3d bias",
                expected: out_channels,
                got: bias.len(),
            });
        }
        Ok(ConvSpec3d {
            in_channels,
            out_channels,
            kernel,
            stride,
            weights,
            bias,
        })
    }

    /// Xavier-uniform weights, zero biases.
    pub fn seeded(
        in_channels: usize,
        out_channels: usize,
        kernel: (usize, usize, usize),
        stride: (usize, usize, usize),
        rng: &mut ParamRng,
    ) -> Result<Self, TensorError> {
        let taps = kernel.0 * kernel.1 * kernel.2;
        let fan_in = in_channels * taps;
        let fan_out = out_channels * taps;
        let weights = rng.xavier_uniform(out_channels * in_channels * taps, fan_in, fan_out);
        let bias = vec![0.0; out_channels];
        ConvSpec3d::new(in_channels, out_channels, kernel, stride, weights, bias)
    }

    pub fn output_dims(&self, dims: Dims) -> Dims {
        let out = |n: usize, k: usize, s: usize| {
            let pad = (k - 1) / 2;
            (n + 2 * pad - k) / s + 1
        };
        Dims::new(
            out(dims.depth, self.kernel.0, self.stride.0),
            out(dims.height, self.kernel.1, self.stride.1),
            out(dims.width, self.kernel.2, self.stride.2),
        )
    }

    #[inline]
    fn weight(&self, o: usize, i: usize, kd: usize, kh: usize, kw: usize) -> f64 {
        let (nd, nh, nw) = self.kernel;
        self.weights[(((o * self.in_channels + i) * nd + kd) * nh + kh) * nw + kw]
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Zero-padded 3-D convolution. Output channel `o` at voxel `p` is
/// `bias[o] + sum_i sum_k weight[o][i][k] * input[i][stride*p + k - pad]`,
/// taps outside the input reading zero.
pub fn conv3d(input: &Volume, spec: &ConvSpec3d) -> Result<Volume, TensorError> {
    if input.channels != spec.in_channels {
        return Err(TensorError::ShapeMismatch {
            axis: "channels",
            expected: spec.in_channels,
            got: input.channels,
        });
    }
    let in_dims = input.dims;
    let out_dims = spec.output_dims(in_dims);
    let n_out = out_dims.n();
    let (kd, kh, kw) = spec.kernel;
    let (sd, sh, sw) = spec.stride;
    let (pd, ph, pw) = ((kd - 1) / 2, (kh - 1) / 2, (kw - 1) / 2);

    let mut data = vec![0.0; spec.out_channels * n_out];
    data.par_chunks_mut(n_out).enumerate().for_each(|(o, out)| {
        for od in 0..out_dims.depth {
            for oh in 0..out_dims.height {
                for ow in 0..out_dims.width {
                    let mut acc = spec.bias[o];
                    for i in 0..spec.in_channels {
                        let ch = input.channel(i);
                        for t_d in 0..kd {
                            let d = od * sd + t_d;
                            if d < pd || d - pd >= in_dims.depth {
                                continue;
                            }
                            let d = d - pd;
                            for t_h in 0..kh {
                                let h = oh * sh + t_h;
                                if h < ph || h - ph >= in_dims.height {
                                    continue;
                                }
                                let h = h - ph;
                                for t_w in 0..kw {
                                    let w = ow * sw + t_w;
                                    if w < pw || w - pw >= in_dims.width {
                                        continue;
                                    }
                                    let w = w - pw;
                                    acc += spec.weight(o, i, t_d, t_h, t_w)
                                        * ch[in_dims.flat(d, h, w)];
                                }
                            }
                        }
                    }
                    out[out_dims.flat(od, oh, ow)] = acc;
                }
            }
        }
    });

    let mut out = Volume::new(spec.out_channels, out_dims, data)?;
    out.resolution = input.resolution;
    Ok(out)
}

/// 1-D convolution parameters, stride 1, zero padding `(k-1)/2`.
/// Weight layout: `[out][in][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvSpec1d {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl ConvSpec1d {
    pub fn new(
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, TensorError> {
        if in_channels == 0 || out_channels == 0 {
            return Err(TensorError::InvalidSpec(
                "conv1d channel counts must be nonzero".to_string(),
            ));
        }
        if kernel % 2 == 0 || kernel == 0 {
            return Err(TensorError::InvalidSpec(format!(
                "conv1d kernel extent must be odd, got {}",
                kernel
            )));
        }
        let n_w = out_channels * in_channels * kernel;
        if weights.len() != n_w {
            return Err(TensorError::ShapeMismatch {
                axis: "conv1d weights",
                expected: n_w,
                got: weights.len(),
            });
        }
        if bias.len() != out_channels {
            return Err(TensorError::ShapeMismatch {
                axis: "conv1d bias",
                expected: out_channels,
                got: bias.len(),
            });
        }
        Ok(ConvSpec1d {
            in_channels,
            out_channels,
            kernel,
            weights,
            bias,
        })
    }

    pub fn seeded(
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        rng: &mut ParamRng,
    ) -> Result<Self, TensorError> {
        let fan_in = in_channels * kernel;
        let fan_out = out_channels * kernel;
        let weights = rng.xavier_uniform(out_channels * in_channels * kernel, fan_in, fan_out);
        let bias = vec![0.0; out_channels];
        ConvSpec1d::new(in_channels, out_channels, kernel, weights, bias)
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Zero-padded 1-D convolution over every channel sequence, length-preserving.
pub fn conv1d(input: &Sequence, spec: &ConvSpec1d) -> Result<Sequence, TensorError> {
    if input.channels != spec.in_channels {
        return Err(TensorError::ShapeMismatch {
            axis: "channels",
            expected: spec.in_channels,
            got: input.channels,
        });
    }
    let len = input.len;
    let pad = (spec.kernel - 1) / 2;
    let mut out = Sequence::zeros(spec.out_channels, len);
    for o in 0..spec.out_channels {
        for p in 0..len {
            let mut acc = spec.bias[o];
            for i in 0..spec.in_channels {
                let ch = input.channel(i);
                for t in 0..spec.kernel {
                    let q = p + t;
                    if q < pad || q - pad >= len {
                        continue;
                    }
                    acc += spec.weights[(o * spec.in_channels + i) * spec.kernel + t] * ch[q - pad];
                }
            }
            out.set(o, p, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones_spec(kernel: (usize, usize, usize)) -> ConvSpec3d {
        let taps = kernel.0 * kernel.1 * kernel.2;
        ConvSpec3d::new(1, 1, kernel, (1, 1, 1), vec![1.0; taps], vec![0.0]).unwrap()
    }

    #[test]
    fn all_ones_box_kernel_counts_in_support_taps() {
        // 5x5x5 ones, 3x3x3 ones kernel: interior sees 27 taps, a face
        // center sees 18 (one kernel slab hangs off the edge).
        let v = Volume::from_fn(1, Dims::new(5, 5, 5), |_, _, _, _| 1.0);
        let out = conv3d(&v, &ones_spec((3, 3, 3))).unwrap();
        assert_eq!(out.dims, v.dims);
        assert_eq!(out.get(0, 2, 2, 2), 27.0);
        assert_eq!(out.get(0, 0, 2, 2), 18.0);
        assert_eq!(out.get(0, 0, 0, 0), 8.0);
    }

    #[test]
    fn conv1d_box_kernel_matches_hand_sums() {
        let s = Sequence::new(1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let spec = ConvSpec1d::new(1, 1, 3, vec![1.0, 1.0, 1.0], vec![0.0]).unwrap();
        let out = conv1d(&s, &spec).unwrap();
        assert_eq!(out.data, vec![3.0, 6.0, 5.0]);
    }

    #[test]
    fn stride_two_halves_even_extents() {
        let v = Volume::zeros(1, Dims::new(4, 6, 8));
        let spec = ConvSpec3d::new(1, 1, (3, 3, 3), (2, 2, 2), vec![0.0; 27], vec![0.0]).unwrap();
        assert_eq!(spec.output_dims(v.dims), Dims::new(2, 3, 4));
        let out = conv3d(&v, &spec).unwrap();
        assert_eq!(out.dims, Dims::new(2, 3, 4));
    }

    #[test]
    fn kernel_one_is_channel_mixing_only() {
        let v = Volume::from_fn(2, Dims::new(1, 2, 2), |c, _, h, w| {
            (c * 10 + h * 2 + w) as f64
        });
        // out = 2*ch0 + 3*ch1 + 0.5
        let spec =
            ConvSpec3d::new(2, 1, (1, 1, 1), (1, 1, 1), vec![2.0, 3.0], vec![0.5]).unwrap();
        let out = conv3d(&v, &spec).unwrap();
        for h in 0..2 {
            for w in 0..2 {
                let expect = 2.0 * v.get(0, 0, h, w) + 3.0 * v.get(1, 0, h, w) + 0.5;
                assert_eq!(out.get(0, 0, h, w), expect);
            }
        }
    }

    #[test]
    fn conv_is_linear_in_input() {
        let mut rng = ParamRng::seed(7);
        let spec = ConvSpec3d::seeded(2, 3, (3, 3, 3), (1, 1, 1), &mut rng).unwrap();
        let zero_bias = {
            let mut s = spec.clone();
            s.bias = vec![0.0; s.out_channels];
            s
        };
        let a = Volume::from_fn(2, Dims::new(3, 4, 5), |c, d, h, w| {
            ((c + 2 * d + 3 * h + 5 * w) % 7) as f64 - 3.0
        });
        let b = Volume::from_fn(2, Dims::new(3, 4, 5), |c, d, h, w| {
            ((3 * c + d + 7 * h + w) % 5) as f64 * 0.25
        });
        let sum = Volume::new(
            2,
            a.dims,
            a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
        )
        .unwrap();
        let ca = conv3d(&a, &zero_bias).unwrap();
        let cb = conv3d(&b, &zero_bias).unwrap();
        let cs = conv3d(&sum, &zero_bias).unwrap();
        for i in 0..cs.data.len() {
            assert!((cs.data[i] - (ca.data[i] + cb.data[i])).abs() <= 1e-12);
        }
    }

    #[test]
    fn even_kernel_rejected() {
        assert!(ConvSpec3d::new(1, 1, (2, 3, 3), (1, 1, 1), vec![0.0; 18], vec![0.0]).is_err());
        assert!(ConvSpec1d::new(1, 1, 4, vec![0.0; 4], vec![0.0]).is_err());
    }
}
