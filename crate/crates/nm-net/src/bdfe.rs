use nm_tensor::{
    conv1d, conv3d, instance_norm_seq, instance_norm_volume, pointwise, pointwise_seq,
    Activation, ConvSpec1d, ConvSpec3d, InstanceNorm, ParamRng, Sequence, Volume,
};

use crate::error::NetError;
use crate::strip::strip_pool;

/// Per-axis gate vectors, each entry strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct GateVectors {
    pub z_d: Sequence,
    pub z_h: Sequence,
    pub z_w: Sequence,
}

/// Local boundary gate: two 3³ convs around a norm+ReLU produce the working
/// features I'; plane means per axis pass through one shared 1D conv, norm,
/// and sigmoid to form gates that rescale I' along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfeParams {
    pub conv_in: ConvSpec3d,
    pub norm: InstanceNorm,
    pub conv_out: ConvSpec3d,
    /// One set of 1D conv weights reused for the d, h, and w strips.
    pub gate_conv: ConvSpec1d,
    pub gate_norm: InstanceNorm,
    /// Test hook: bypass the computed gates.
    pub gate_override: Option<GateVectors>,
}

impl BdfeParams {
    pub fn seeded(
        in_channels: usize,
        channels: usize,
        rng: &mut ParamRng,
    ) -> Result<BdfeParams, NetError> {
        Ok(BdfeParams {
            conv_in: ConvSpec3d::seeded(in_channels, channels, (3, 3, 3), (1, 1, 1), rng)?,
            norm: InstanceNorm::identity(channels),
            conv_out: ConvSpec3d::seeded(channels, channels, (3, 3, 3), (1, 1, 1), rng)?,
            gate_conv: ConvSpec1d::seeded(channels, channels, 3, rng)?,
            gate_norm: InstanceNorm::identity(channels),
            gate_override: None,
        })
    }

    pub fn channels(&self) -> usize {
        self.conv_out.out_channels
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BdfeOutput {
    pub i_prime: Volume,
    pub gates: GateVectors,
    pub x_local: Volume,
}

/// I' = Conv(ReLU(IN(Conv(I)))); gates z_axis = σ(IN(Conv¹(strip means of I')));
/// X_local[c,d,h,w] = I'[c,d,h,w] · z_d[c,d] · z_h[c,h] · z_w[c,w].
pub fn bdfe_forward(input: &Volume, params: &BdfeParams) -> Result<BdfeOutput, NetError> {
    let pre = conv3d(input, &params.conv_in)?;
    let pre = instance_norm_volume(&pre, &params.norm)?;
    let pre = pointwise(&pre, Activation::Relu);
    let i_prime = conv3d(&pre, &params.conv_out)?;

    let gates = match &params.gate_override {
        Some(g) => {
            check_gate_shapes(g, &i_prime)?;
            g.clone()
        }
        None => {
            let strips = strip_pool(&i_prime);
            GateVectors {
                z_d: gate_path(&strips.y_d, params)?,
                z_h: gate_path(&strips.y_h, params)?,
                z_w: gate_path(&strips.y_w, params)?,
            }
        }
    };

    let dims = i_prime.dims;
    let mut x_local = i_prime.clone();
    for c in 0..x_local.channels {
        let zd = gates.z_d.channel(c);
        let zh = gates.z_h.channel(c);
        let zw = gates.z_w.channel(c);
        for d in 0..dims.depth {
            for h in 0..dims.height {
                let base = c * dims.n() + dims.flat(d, h, 0);
                let g_dh = zd[d] * zh[h];
                for w in 0..dims.width {
                    x_local.data[base + w] *= g_dh * zw[w];
                }
            }
        }
    }

    Ok(BdfeOutput {
        i_prime,
        gates,
        x_local,
    })
}

fn gate_path(strip: &Sequence, params: &BdfeParams) -> Result<Sequence, NetError> {
    let z = conv1d(strip, &params.gate_conv)?;
    let z = instance_norm_seq(&z, &params.gate_norm)?;
    Ok(pointwise_seq(&z, Activation::Sigmoid))
}

fn check_gate_shapes(g: &GateVectors, i_prime: &Volume) -> Result<(), NetError> {
    let want = [
        ("depth gate", &g.z_d, i_prime.dims.depth),
        ("height gate", &g.z_h, i_prime.dims.height),
        ("width gate", &g.z_w, i_prime.dims.width),
    ];
    for (what, seq, len) in want {
        if seq.channels != i_prime.channels || seq.len != len {
            return Err(NetError::ShapeMismatch {
                what,
                expected: format!("{}x{}", i_prime.channels, len),
                got: format!("{}x{}", seq.channels, seq.len),
            });
        }
    }
    Ok(())
}
