use crate::error::TensorError;
use crate::volume::{Sequence, Volume};

pub const DEFAULT_NORM_EPS: f64 = 1e-5;

/// Per-channel affine instance norm: `gamma * (x - mean) / sqrt(var + eps) + beta`,
/// statistics taken over the spatial extent of each channel independently
/// (population variance, divide by N).
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceNorm {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub eps: f64,
}

impl InstanceNorm {
    pub fn identity(channels: usize) -> Self {
        InstanceNorm {
            gamma: vec![1.0; channels],
            beta: vec![0.0; channels],
            eps: DEFAULT_NORM_EPS,
        }
    }

    pub fn new(gamma: Vec<f64>, beta: Vec<f64>, eps: f64) -> Result<Self, TensorError> {
        if gamma.len() != beta.len() {
            return Err(TensorError::ShapeMismatch {
                axis: "norm beta",
                expected: gamma.len(),
                got: beta.len(),
            });
        }
        if !(eps > 0.0) {
            return Err(TensorError::InvalidSpec(format!(
                "norm eps must be positive, got {}",
                eps
            )));
        }
        Ok(InstanceNorm { gamma, beta, eps })
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    pub fn param_count(&self) -> usize {
        self.gamma.len() + self.beta.len()
    }

    fn normalize_slice(&self, c: usize, x: &mut [f64]) {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let inv = 1.0 / (var + self.eps).sqrt();
        let (g, b) = (self.gamma[c], self.beta[c]);
        for v in x.iter_mut() {
            *v = g * (*v - mean) * inv + b;
        }
    }
}

pub fn instance_norm_volume(input: &Volume, norm: &InstanceNorm) -> Result<Volume, TensorError> {
    if input.channels != norm.channels() {
        return Err(TensorError::ShapeMismatch {
            axis: "channels",
            expected: norm.channels(),
            got: input.channels,
        });
    }
    let n = input.dims.n();
    let mut out = input.clone();
    for c in 0..out.channels {
        norm.normalize_slice(c, &mut out.data[c * n..(c + 1) * n]);
    }
    Ok(out)
}

pub fn instance_norm_seq(input: &Sequence, norm: &InstanceNorm) -> Result<Sequence, TensorError> {
    if input.channels != norm.channels() {
        return Err(TensorError::ShapeMismatch {
            axis: "channels",
            expected: norm.channels(),
            got: input.channels,
        });
    }
    let len = input.len;
    let mut out = input.clone();
    for c in 0..out.channels {
        norm.normalize_slice(c, &mut out.data[c * len..(c + 1) * len]);
    }
    Ok(out)
}
