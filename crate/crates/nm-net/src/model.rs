use nm_scan::{MechanismRegistry, ScanBranch};
use nm_tensor::{
    conv3d, instance_norm_volume, pointwise, Activation, ConvSpec3d, InstanceNorm, ParamRng,
    Volume,
};

use crate::checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, TensorEntry};
use crate::error::NetError;
use crate::mpfi::{mpfi_forward, MpfiParams};
use crate::prior::ResolutionPrior;

/// Widths, sizes, and seeds that determine a model exactly. Two configs with
/// equal fields always build bit-identical models.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub in_channels: usize,
    pub widths: Vec<usize>,
    pub n_state: usize,
    pub chunk: usize,
    pub prior: ResolutionPrior,
    pub mechanism: String,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(prior: ResolutionPrior, seed: u64) -> ModelConfig {
        ModelConfig {
            in_channels: 1,
            widths: vec![16, 32, 64],
            n_state: 8,
            chunk: 2048,
            prior,
            mechanism: nm_scan::DEFAULT_MECHANISM.to_string(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.in_channels == 0 {
            return Err(NetError::InvalidConfig(
                "input channel count must be nonzero".to_string(),
            ));
        }
        if self.widths.is_empty() {
            return Err(NetError::InvalidConfig(
                "stage widths must be nonempty".to_string(),
            ));
        }
        if self.widths[0] == 0 {
            return Err(NetError::InvalidConfig(
                "stage widths must be positive".to_string(),
            ));
        }
        if self.widths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NetError::InvalidConfig(format!(
                "stage widths must increase, got {:?}",
                self.widths
            )));
        }
        if self.n_state == 0 || self.chunk == 0 {
            return Err(NetError::InvalidConfig(
                "state size and chunk must be nonzero".to_string(),
            ));
        }
        MechanismRegistry::builtin().get(&self.mechanism)?;
        Ok(())
    }

    /// Per-stage stride factors for all but the last stage. The first stage
    /// keeps full depth on strongly anisotropic data (axial extent is
    /// already coarse); deeper stages always halve every axis.
    pub fn downsample_factors(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.widths.len().saturating_sub(1) {
            if i == 0 && self.prior.anisotropy() >= 2.0 {
                out.push((1, 2, 2));
            } else {
                out.push((2, 2, 2));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderStage {
    pub mpfi: MpfiParams,
    /// Strided conv; absent on the deepest stage.
    pub down: Option<ConvSpec3d>,
    pub factors: (usize, usize, usize),
}

impl EncoderStage {
    /// Returns (features, skip). The skip is the pre-downsample fusion
    /// output; the deepest stage yields no skip.
    pub fn forward(
        &self,
        x: &Volume,
        prior: &ResolutionPrior,
        branches: &[ScanBranch],
        stage_idx: usize,
    ) -> Result<(Volume, Option<Volume>), NetError> {
        let (fused, _) = mpfi_forward(x, &self.mpfi, prior, branches)?;
        match &self.down {
            Some(down) => {
                check_divisible(stage_idx, &fused, self.factors)?;
                let next = conv3d(&fused, down)?;
                Ok((next, Some(fused)))
            }
            None => Ok((fused, None)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderStage {
    pub factors: (usize, usize, usize),
    pub conv1: ConvSpec3d,
    pub norm1: InstanceNorm,
    pub conv2: ConvSpec3d,
    pub norm2: InstanceNorm,
}

impl DecoderStage {
    /// Nearest-neighbor upsample, concatenate the skip, then two
    /// conv+norm+ReLU layers.
    pub fn forward(&self, x: &Volume, skip: &Volume) -> Result<Volume, NetError> {
        let up = nearest_upsample(x, self.factors);
        if up.dims != skip.dims {
            return Err(NetError::ShapeMismatch {
                what: "skip connection",
                expected: up.dims.to_string(),
                got: skip.dims.to_string(),
            });
        }
        let cat = up.concat_channels(skip)?;
        let a = pointwise(
            &instance_norm_volume(&conv3d(&cat, &self.conv1)?, &self.norm1)?,
            Activation::Relu,
        );
        Ok(pointwise(
            &instance_norm_volume(&conv3d(&a, &self.conv2)?, &self.norm2)?,
            Activation::Relu,
        ))
    }
}

fn check_divisible(
    stage: usize,
    x: &Volume,
    factors: (usize, usize, usize),
) -> Result<(), NetError> {
    let checks = [
        ("depth", x.dims.depth, factors.0),
        ("height", x.dims.height, factors.1),
        ("width", x.dims.width, factors.2),
    ];
    for (axis, extent, factor) in checks {
        if extent % factor != 0 {
            return Err(NetError::ExtentNotDivisible {
                stage,
                axis,
                extent,
                factor,
            });
        }
    }
    Ok(())
}

/// Each output voxel copies its floor-divided source voxel.
pub fn nearest_upsample(x: &Volume, factors: (usize, usize, usize)) -> Volume {
    let dims = x.dims;
    let out_dims = nm_tensor::Dims::new(
        dims.depth * factors.0,
        dims.height * factors.1,
        dims.width * factors.2,
    );
    let mut out = Volume::zeros(x.channels, out_dims);
    out.resolution = x.resolution;
    for c in 0..x.channels {
        let src = x.channel(c);
        let base = c * out_dims.n();
        for d in 0..out_dims.depth {
            for h in 0..out_dims.height {
                for w in 0..out_dims.width {
                    out.data[base + out_dims.flat(d, h, w)] =
                        src[dims.flat(d / factors.0, h / factors.1, w / factors.2)];
                }
            }
        }
    }
    out
}

/// The assembled encoder–decoder. Built deterministically from a config;
/// immutable and shareable during inference.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub branches: Vec<ScanBranch>,
    pub encoder: Vec<EncoderStage>,
    pub decoder: Vec<DecoderStage>,
    pub head: ConvSpec3d,
}

impl Model {
    pub fn build(config: ModelConfig) -> Result<Model, NetError> {
        config.validate()?;
        let branches = MechanismRegistry::builtin()
            .get(&config.mechanism)?
            .branches();
        let factors = config.downsample_factors();
        let stages = config.widths.len();
        let mut rng = ParamRng::seed(config.seed);

        let mut encoder = Vec::with_capacity(stages);
        for i in 0..stages {
            let in_ch = if i == 0 {
                config.in_channels
            } else {
                config.widths[i - 1]
            };
            let width = config.widths[i];
            let mpfi = MpfiParams::seeded(in_ch, width, config.n_state, config.chunk, &mut rng)?;
            let (down, f) = if i + 1 < stages {
                let f = factors[i];
                (
                    Some(ConvSpec3d::seeded(width, width, (3, 3, 3), f, &mut rng)?),
                    f,
                )
            } else {
                (None, (1, 1, 1))
            };
            encoder.push(EncoderStage {
                mpfi,
                down,
                factors: f,
            });
        }

        let mut decoder = Vec::with_capacity(stages.saturating_sub(1));
        for i in (0..stages.saturating_sub(1)).rev() {
            let coarse = config.widths[i + 1];
            let fine = config.widths[i];
            decoder.push(DecoderStage {
                factors: factors[i],
                conv1: ConvSpec3d::seeded(coarse + fine, fine, (3, 3, 3), (1, 1, 1), &mut rng)?,
                norm1: InstanceNorm::identity(fine),
                conv2: ConvSpec3d::seeded(fine, fine, (3, 3, 3), (1, 1, 1), &mut rng)?,
                norm2: InstanceNorm::identity(fine),
            });
        }

        let head = ConvSpec3d::seeded(config.widths[0], 3, (1, 1, 1), (1, 1, 1), &mut rng)?;

        Ok(Model {
            config,
            branches,
            encoder,
            decoder,
            head,
        })
    }

    /// Grayscale volume in, 3-channel map in (0,1) out, same spatial shape.
    pub fn forward(&self, x: &Volume) -> Result<Volume, NetError> {
        if x.channels != self.config.in_channels {
            return Err(NetError::ShapeMismatch {
                what: "model input channels",
                expected: self.config.in_channels.to_string(),
                got: x.channels.to_string(),
            });
        }
        let mut skips = Vec::new();
        let mut cur = x.clone();
        for (i, stage) in self.encoder.iter().enumerate() {
            let (next, skip) = stage.forward(&cur, &self.config.prior, &self.branches, i)?;
            if let Some(s) = skip {
                skips.push(s);
            }
            cur = next;
        }
        for dec in &self.decoder {
            let skip = skips.pop().ok_or_else(|| NetError::InvalidConfig(
                "decoder has more stages than recorded skips".to_string(),
            ))?;
            cur = dec.forward(&cur, &skip)?;
        }
        let logits = conv3d(&cur, &self.head)?;
        let mut out = pointwise(&logits, Activation::Sigmoid);
        out.resolution = x.resolution;
        Ok(out)
    }

    /// All learned tensors, named, in a stable order.
    pub fn tensor_entries(&self) -> Vec<TensorEntry> {
        let mut copy = self.clone();
        copy.tensor_slots()
            .into_iter()
            .map(|(name, data)| TensorEntry {
                name,
                dims: vec![data.len() as u64],
                data: std::mem::take(data),
            })
            .collect()
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CheckpointError> {
        write_checkpoint(path, &self.tensor_entries())
    }

    /// Build from config, then replace every tensor from the checkpoint.
    /// Rejects missing, unknown, and wrong-sized tensors.
    pub fn load(config: ModelConfig, path: &std::path::Path) -> Result<Model, NetError> {
        let mut model = Model::build(config)?;
        let entries = read_checkpoint(path).map_err(NetError::Checkpoint)?;
        model
            .load_tensors(entries)
            .map_err(NetError::Checkpoint)?;
        Ok(model)
    }

    pub fn load_tensors(&mut self, entries: Vec<TensorEntry>) -> Result<(), CheckpointError> {
        let mut by_name = std::collections::BTreeMap::new();
        for e in entries {
            let name = e.name.clone();
            if by_name.insert(name.clone(), e).is_some() {
                return Err(CheckpointError::DuplicateTensor(name));
            }
        }
        for (name, slot) in self.tensor_slots() {
            let entry = by_name
                .remove(&name)
                .ok_or(CheckpointError::MissingTensor(name.clone()))?;
            if entry.data.len() != slot.len() {
                return Err(CheckpointError::LengthMismatch {
                    name,
                    expected: slot.len(),
                    got: entry.data.len(),
                });
            }
            *slot = entry.data;
        }
        if let Some(name) = by_name.into_keys().next() {
            return Err(CheckpointError::UnknownTensor(name));
        }
        Ok(())
    }

    fn tensor_slots(&mut self) -> Vec<(String, &mut Vec<f64>)> {
        let mut out: Vec<(String, &mut Vec<f64>)> = Vec::new();
        for (i, stage) in self.encoder.iter_mut().enumerate() {
            let p = format!("enc{}", i);
            let bdfe = &mut stage.mpfi.bdfe;
            out.push((format!("{}.conv_in.weights", p), &mut bdfe.conv_in.weights));
            out.push((format!("{}.conv_in.bias", p), &mut bdfe.conv_in.bias));
            out.push((format!("{}.norm.gamma", p), &mut bdfe.norm.gamma));
            out.push((format!("{}.norm.beta", p), &mut bdfe.norm.beta));
            out.push((format!("{}.conv_out.weights", p), &mut bdfe.conv_out.weights));
            out.push((format!("{}.conv_out.bias", p), &mut bdfe.conv_out.bias));
            out.push((format!("{}.gate_conv.weights", p), &mut bdfe.gate_conv.weights));
            out.push((format!("{}.gate_conv.bias", p), &mut bdfe.gate_conv.bias));
            out.push((format!("{}.gate_norm.gamma", p), &mut bdfe.gate_norm.gamma));
            out.push((format!("{}.gate_norm.beta", p), &mut bdfe.gate_norm.beta));
            let ssm = &mut stage.mpfi.ssm;
            out.push((format!("{}.ssm.a", p), &mut ssm.a));
            out.push((format!("{}.ssm.w_delta", p), &mut ssm.w_delta));
            out.push((format!("{}.ssm.w_b", p), &mut ssm.w_b));
            out.push((format!("{}.ssm.w_c", p), &mut ssm.w_c));
            out.push((format!("{}.ssm.d_skip", p), &mut ssm.d_skip));
            if let Some(down) = &mut stage.down {
                out.push((format!("{}.down.weights", p), &mut down.weights));
                out.push((format!("{}.down.bias", p), &mut down.bias));
            }
        }
        for (i, dec) in self.decoder.iter_mut().enumerate() {
            let p = format!("dec{}", i);
            out.push((format!("{}.conv1.weights", p), &mut dec.conv1.weights));
            out.push((format!("{}.conv1.bias", p), &mut dec.conv1.bias));
            out.push((format!("{}.norm1.gamma", p), &mut dec.norm1.gamma));
            out.push((format!("{}.norm1.beta", p), &mut dec.norm1.beta));
            out.push((format!("{}.conv2.weights", p), &mut dec.conv2.weights));
            out.push((format!("{}.conv2.bias", p), &mut dec.conv2.bias));
            out.push((format!("{}.norm2.gamma", p), &mut dec.norm2.gamma));
            out.push((format!("{}.norm2.beta", p), &mut dec.norm2.beta));
        }
        out.push(("head.weights".to_string(), &mut self.head.weights));
        out.push(("head.bias".to_string(), &mut self.head.bias));
        out
    }
}
