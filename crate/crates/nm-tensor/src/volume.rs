use crate::error::TensorError;

/// Spatial extents of a volume, ordered (depth, height, width).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub depth: usize,
    pub height: usize,
    pub width: usize,
}

impl Dims {
    pub fn new(depth: usize, height: usize, width: usize) -> Self {
        Dims {
            depth,
            height,
            width,
        }
    }

    /// Total voxel count.
    pub fn n(&self) -> usize {
        self.depth * self.height * self.width
    }

    /// Flat index of (d, h, w): `d*H*W + h*W + w`.
    #[inline]
    pub fn flat(&self, d: usize, h: usize, w: usize) -> usize {
        (d * self.height + h) * self.width + w
    }

    /// Inverse of [`Dims::flat`].
    #[inline]
    pub fn coords(&self, flat: usize) -> (usize, usize, usize) {
        let w = flat % self.width;
        let rest = flat / self.width;
        (rest / self.height, rest % self.height, w)
    }

    pub fn validate(&self) -> Result<(), TensorError> {
        for (axis, extent) in [
            ("depth", self.depth),
            ("height", self.height),
            ("width", self.width),
        ] {
            if extent == 0 {
                return Err(TensorError::ShapeMismatch {
                    axis,
                    expected: 1,
                    got: 0,
                });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.depth, self.height, self.width)
    }
}

/// Voxel resolution in nanometers: axial (z) and transverse (x/y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub axial_nm: f64,
    pub transverse_nm: f64,
}

/// Dense rank-4 array: `channels` × depth × height × width, row-major.
///
/// Within a channel, the flat voxel index is `d*H*W + h*W + w`; channel `c`
/// starts at offset `c * dims.n()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    pub channels: usize,
    pub dims: Dims,
    pub data: Vec<f64>,
    pub resolution: Option<Resolution>,
}

impl Volume {
    pub fn new(channels: usize, dims: Dims, data: Vec<f64>) -> Result<Self, TensorError> {
        dims.validate()?;
        if channels == 0 {
            return Err(TensorError::ShapeMismatch {
                axis: "channels",
                expected: 1,
                got: 0,
            });
        }
        let expected = channels * dims.n();
        if data.len() != expected {
            return Err(TensorError::ShapeMismatch {
                axis: "data length",
                expected,
                got: data.len(),
            });
        }
        Ok(Volume {
            channels,
            dims,
            data,
            resolution: None,
        })
    }

    pub fn zeros(channels: usize, dims: Dims) -> Self {
        Volume {
            channels,
            dims,
            data: vec![0.0; channels * dims.n()],
            resolution: None,
        }
    }

    pub fn from_fn(
        channels: usize,
        dims: Dims,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut v = Volume::zeros(channels, dims);
        for c in 0..channels {
            for d in 0..dims.depth {
                for h in 0..dims.height {
                    for w in 0..dims.width {
                        let i = v.idx(c, d, h, w);
                        v.data[i] = f(c, d, h, w);
                    }
                }
            }
        }
        v
    }

    pub fn with_resolution(mut self, res: Resolution) -> Self {
        self.resolution = Some(res);
        self
    }

    #[inline]
    pub fn idx(&self, c: usize, d: usize, h: usize, w: usize) -> usize {
        c * self.dims.n() + self.dims.flat(d, h, w)
    }

    #[inline]
    pub fn get(&self, c: usize, d: usize, h: usize, w: usize) -> f64 {
        self.data[self.idx(c, d, h, w)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, d: usize, h: usize, w: usize, value: f64) {
        let i = self.idx(c, d, h, w);
        self.data[i] = value;
    }

    /// Slice holding channel `c`.
    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.dims.n();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Concatenate along the channel axis; spatial dims must agree.
    pub fn concat_channels(&self, other: &Volume) -> Result<Volume, TensorError> {
        if self.dims != other.dims {
            return Err(TensorError::ShapeMismatch {
                axis: "spatial dims",
                expected: self.dims.n(),
                got: other.dims.n(),
            });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Volume {
            channels: self.channels + other.channels,
            dims: self.dims,
            data,
            resolution: self.resolution,
        })
    }
}

/// A batch of per-channel rank-1 sequences of a common length.
///
/// Layout is channel-major: entry `i` of channel `c` lives at `c*len + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub channels: usize,
    pub len: usize,
    pub data: Vec<f64>,
}

impl Sequence {
    pub fn new(channels: usize, len: usize, data: Vec<f64>) -> Result<Self, TensorError> {
        if data.len() != channels * len {
            return Err(TensorError::ShapeMismatch {
                axis: "data length",
                expected: channels * len,
                got: data.len(),
            });
        }
        Ok(Sequence {
            channels,
            len,
            data,
        })
    }

    pub fn zeros(channels: usize, len: usize) -> Self {
        Sequence {
            channels,
            len,
            data: vec![0.0; channels * len],
        }
    }

    #[inline]
    pub fn get(&self, c: usize, i: usize) -> f64 {
        self.data[c * self.len + i]
    }

    #[inline]
    pub fn set(&mut self, c: usize, i: usize, value: f64) {
        self.data[c * self.len + i] = value;
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.len..(c + 1) * self.len]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_coords_invert() {
        let dims = Dims::new(3, 4, 5);
        for flat in 0..dims.n() {
            let (d, h, w) = dims.coords(flat);
            assert_eq!(dims.flat(d, h, w), flat);
        }
    }

    #[test]
    fn volume_rejects_wrong_length() {
        let err = Volume::new(2, Dims::new(2, 2, 2), vec![0.0; 15]).unwrap_err();
        assert!(matches!(err, TensorError::ShapeMismatch { .. }));
    }

    #[test]
    fn volume_rejects_zero_axis() {
        assert!(Volume::new(1, Dims::new(0, 2, 2), vec![]).is_err());
        assert!(Volume::new(0, Dims::new(1, 1, 1), vec![]).is_err());
    }

    #[test]
    fn concat_stacks_channels() {
        let a = Volume::from_fn(1, Dims::new(1, 1, 2), |_, _, _, w| w as f64);
        let b = Volume::from_fn(2, Dims::new(1, 1, 2), |c, _, _, _| 10.0 + c as f64);
        let cat = a.concat_channels(&b).unwrap();
        assert_eq!(cat.channels, 3);
        assert_eq!(cat.data, vec![0.0, 1.0, 10.0, 10.0, 11.0, 11.0]);
    }
}
