use nm_scan::ScanBranch;
use nm_ssm::SsmParams;
use nm_tensor::{ParamRng, Volume};

use crate::bdfe::{bdfe_forward, BdfeParams};
use crate::cfi::cfi_forward;
use crate::error::NetError;
use crate::prior::ResolutionPrior;
use crate::scfe::scfe_forward;

/// One fusion block: the local gate and the global mixer both read the
/// working features I', and their outputs cross-modulate each other.
#[derive(Debug, Clone, PartialEq)]
pub struct MpfiParams {
    pub bdfe: BdfeParams,
    pub ssm: SsmParams,
    pub chunk: usize,
}

impl MpfiParams {
    pub fn seeded(
        in_channels: usize,
        channels: usize,
        n_state: usize,
        chunk: usize,
        rng: &mut ParamRng,
    ) -> Result<MpfiParams, NetError> {
        Ok(MpfiParams {
            bdfe: BdfeParams::seeded(in_channels, channels, rng)?,
            ssm: SsmParams::seeded(channels, n_state, rng),
            chunk,
        })
    }

    pub fn channels(&self) -> usize {
        self.bdfe.channels()
    }
}

/// Everything the block computes, kept for inspection in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct MpfiIntermediates {
    pub i_prime: Volume,
    pub x_local: Volume,
    pub x_global: Volume,
    pub x_local_mod: Volume,
    pub x_global_mod: Volume,
    pub o_mpfi: Volume,
}

pub fn mpfi_forward(
    x: &Volume,
    params: &MpfiParams,
    prior: &ResolutionPrior,
    branches: &[ScanBranch],
) -> Result<(Volume, MpfiIntermediates), NetError> {
    let local = bdfe_forward(x, &params.bdfe)?;
    let x_global = scfe_forward(&local.i_prime, &params.ssm, prior, branches, params.chunk)?;
    let o_mpfi = cfi_forward(&local.x_local, &x_global)?;

    // The two modulated halves, recorded separately.
    let mut x_local_mod = local.x_local.clone();
    let mut x_global_mod = x_global.clone();
    for i in 0..x_local_mod.data.len() {
        let a = local.x_local.data[i];
        let g = x_global.data[i];
        x_local_mod.data[i] = a * nm_tensor::sigmoid(g);
        x_global_mod.data[i] = g * nm_tensor::sigmoid(a);
    }

    let inter = MpfiIntermediates {
        i_prime: local.i_prime,
        x_local: local.x_local,
        x_global,
        x_local_mod,
        x_global_mod,
        o_mpfi: o_mpfi.clone(),
    };
    Ok((o_mpfi, inter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nm_scan::{MechanismRegistry, DEFAULT_MECHANISM};
    use nm_tensor::Dims;

    #[test]
    fn intermediates_are_consistent() {
        let mut rng = ParamRng::seed(20);
        let params = MpfiParams::seeded(1, 2, 3, 16, &mut rng).unwrap();
        let prior = ResolutionPrior::new(40.0, 4.0).unwrap();
        let branches = MechanismRegistry::builtin()
            .get(DEFAULT_MECHANISM)
            .unwrap()
            .branches();
        let x = Volume::from_fn(1, Dims::new(2, 4, 4), |_, d, h, w| {
            ((d * 16 + h * 4 + w) as f64 * 0.37).sin()
        });
        let (o, inter) = mpfi_forward(&x, &params, &prior, &branches).unwrap();
        assert_eq!(o.data, inter.o_mpfi.data);
        assert_eq!(o.channels, 2);
        assert_eq!(o.dims, x.dims);
        // The two modulated halves sum to the output.
        for i in 0..o.data.len() {
            let sum = inter.x_local_mod.data[i] + inter.x_global_mod.data[i];
            assert!((o.data[i] - sum).abs() < 1e-15);
        }
    }

    #[test]
    fn block_is_deterministic() {
        let mut rng_a = ParamRng::seed(21);
        let params_a = MpfiParams::seeded(1, 2, 2, 8, &mut rng_a).unwrap();
        let mut rng_b = ParamRng::seed(21);
        let params_b = MpfiParams::seeded(1, 2, 2, 8, &mut rng_b).unwrap();
        assert_eq!(params_a, params_b);

        let prior = ResolutionPrior::new(8.0, 8.0).unwrap();
        let branches = MechanismRegistry::builtin()
            .get("cross-transverse")
            .unwrap()
            .branches();
        let x = Volume::from_fn(1, Dims::new(2, 3, 3), |_, d, h, w| {
            (d as f64) - 0.3 * (h as f64) + 0.1 * (w as f64)
        });
        let (o1, _) = mpfi_forward(&x, &params_a, &prior, &branches).unwrap();
        let (o2, _) = mpfi_forward(&x, &params_b, &prior, &branches).unwrap();
        assert_eq!(o1.data, o2.data);
    }
}
