use nm_tensor::{silu, ParamRng, Sequence};

use crate::error::SsmError;
use crate::params::{ScanState, SsmParams};
use crate::scan::selective_scan_chunked;

/// Gated wrapper around the scan kernel: expand the channel vector, scan the
/// main branch, gate it with SiLU of the side branch, project back down.
/// All three maps are bias-free, so zero input yields zero output.
#[derive(Debug, Clone, PartialEq)]
pub struct MambaBlockParams {
    pub in_channels: usize,
    pub inner_channels: usize,
    pub w_in: Vec<f64>,
    pub w_gate: Vec<f64>,
    pub w_out: Vec<f64>,
    pub ssm: SsmParams,
}

impl MambaBlockParams {
    pub fn seeded(
        in_channels: usize,
        expand: usize,
        n_state: usize,
        rng: &mut ParamRng,
    ) -> MambaBlockParams {
        let inner = in_channels * expand.max(1);
        MambaBlockParams {
            in_channels,
            inner_channels: inner,
            w_in: rng.xavier_uniform(inner * in_channels, in_channels, inner),
            w_gate: rng.xavier_uniform(inner * in_channels, in_channels, inner),
            w_out: rng.xavier_uniform(in_channels * inner, inner, in_channels),
            ssm: SsmParams::seeded(inner, n_state, rng),
        }
    }
}

fn matmul_seq(w: &[f64], rows: usize, cols: usize, x: &Sequence) -> Sequence {
    let mut out = Sequence::zeros(rows, x.len);
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let dst_base = r * x.len;
        for (j, wj) in row.iter().enumerate() {
            if *wj == 0.0 {
                continue;
            }
            let src = x.channel(j);
            for t in 0..x.len {
                out.data[dst_base + t] += wj * src[t];
            }
        }
    }
    out
}

pub fn mamba_block(
    x: &Sequence,
    p: &MambaBlockParams,
    chunk: usize,
) -> Result<Sequence, SsmError> {
    if x.channels != p.in_channels {
        return Err(SsmError::ShapeMismatch {
            what: "block input channels",
            expected: p.in_channels,
            got: x.channels,
        });
    }
    let inner = p.inner_channels;
    let u = matmul_seq(&p.w_in, inner, p.in_channels, x);
    let gate = matmul_seq(&p.w_gate, inner, p.in_channels, x);
    let h0 = ScanState::zeros(inner, p.ssm.n_state);
    let (scanned, _) = selective_scan_chunked(&u, &p.ssm, &h0, chunk)?;
    let mut gated = scanned;
    for (v, g) in gated.data.iter_mut().zip(&gate.data) {
        *v *= silu(*g);
    }
    Ok(matmul_seq(&p.w_out, p.in_channels, inner, &gated))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_passes_through_as_zero() {
        let mut rng = ParamRng::seed(4);
        let p = MambaBlockParams::seeded(3, 2, 4, &mut rng);
        let x = Sequence::zeros(3, 12);
        let y = mamba_block(&x, &p, 5).unwrap();
        assert_eq!(y.channels, 3);
        assert_eq!(y.len, 12);
        assert!(y.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn deterministic_across_calls() {
        let mut rng = ParamRng::seed(4);
        let p = MambaBlockParams::seeded(2, 2, 3, &mut rng);
        let x = Sequence::new(2, 9, ParamRng::seed(8).uniform(18, -1.0, 1.0)).unwrap();
        let a = mamba_block(&x, &p, 4).unwrap();
        let b = mamba_block(&x, &p, 4).unwrap();
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn channel_mismatch_rejected() {
        let mut rng = ParamRng::seed(4);
        let p = MambaBlockParams::seeded(3, 2, 4, &mut rng);
        let x = Sequence::zeros(2, 5);
        assert!(mamba_block(&x, &p, 4).is_err());
    }
}
