use nm_scan::{build_order, flatten, unflatten, ScanBranch};
use nm_ssm::{selective_scan_chunked, ScanState, SsmParams};
use nm_tensor::Volume;

use crate::error::NetError;
use crate::prior::ResolutionPrior;

/// Global mixer: serialize the volume along each branch's order, run the
/// shared scan kernel, un-flatten through the branch's own inverse, and sum
/// the branch outputs scaled by their orientation weights (λ1 transverse,
/// λ2 axial, 1 for unweighted branches). Branches accumulate in their listed
/// order, so the result is independent of thread count.
pub fn scfe_forward(
    x: &Volume,
    ssm: &SsmParams,
    prior: &ResolutionPrior,
    branches: &[ScanBranch],
    chunk: usize,
) -> Result<Volume, NetError> {
    if ssm.channels != x.channels {
        return Err(NetError::ShapeMismatch {
            what: "mixer channels",
            expected: ssm.channels.to_string(),
            got: x.channels.to_string(),
        });
    }
    if branches.is_empty() {
        return Err(NetError::InvalidConfig(
            "scan mechanism has no branches".to_string(),
        ));
    }
    let (lambda1, lambda2) = prior.lambdas();
    let h0 = ScanState::zeros(ssm.channels, ssm.n_state);
    let mut out = Volume::zeros(x.channels, x.dims);
    out.resolution = x.resolution;
    for branch in branches {
        let order = build_order(&branch.variant, x.dims)?;
        let seq = flatten(x, &order)?;
        let (mixed, _) = selective_scan_chunked(&seq, ssm, &h0, chunk)?;
        let vol = unflatten(&mixed, &order)?;
        let weight = branch.weight.resolve(lambda1, lambda2);
        for (acc, v) in out.data.iter_mut().zip(&vol.data) {
            *acc += weight * v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nm_scan::{MechanismRegistry, ScanVariant, DEFAULT_MECHANISM};
    use nm_tensor::{Dims, ParamRng};

    fn test_volume(seed: u64, channels: usize, dims: Dims) -> Volume {
        let data = ParamRng::seed(seed).uniform(channels * dims.n(), -1.0, 1.0);
        Volume::new(channels, dims, data).unwrap()
    }

    fn default_branches() -> Vec<ScanBranch> {
        MechanismRegistry::builtin()
            .get(DEFAULT_MECHANISM)
            .unwrap()
            .branches()
    }

    fn prior_with_lambda2(lambda2: f64) -> ResolutionPrior {
        // α = 0 pins the schedule at β regardless of anisotropy.
        ResolutionPrior::with_schedule(1.0, 1.0, 0.0, lambda2).unwrap()
    }

    #[test]
    fn zero_transverse_weight_leaves_axial_pair_only() {
        let dims = Dims::new(2, 3, 2);
        let x = test_volume(1, 2, dims);
        let mut rng = ParamRng::seed(2);
        let ssm = SsmParams::seeded(2, 3, &mut rng);
        let out = scfe_forward(&x, &ssm, &prior_with_lambda2(2.0), &default_branches(), 64)
            .unwrap();

        // By hand: 2·(M(a1) + M(a2)).
        let h0 = ScanState::zeros(2, 3);
        let mut expect = Volume::zeros(2, dims);
        for variant in [ScanVariant::AxialPrimary, ScanVariant::AxialCross] {
            let order = build_order(&variant, dims).unwrap();
            let seq = flatten(&x, &order).unwrap();
            let (mixed, _) = selective_scan_chunked(&seq, &ssm, &h0, 64).unwrap();
            let vol = unflatten(&mixed, &order).unwrap();
            for (acc, v) in expect.data.iter_mut().zip(&vol.data) {
                *acc += 2.0 * v;
            }
        }
        for (a, b) in out.data.iter().zip(&expect.data) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_input_with_zero_skip_gives_zero() {
        let dims = Dims::new(2, 2, 2);
        let x = Volume::zeros(1, dims);
        let mut rng = ParamRng::seed(3);
        let mut ssm = SsmParams::seeded(1, 2, &mut rng);
        ssm.d_skip = vec![0.0];
        let out = scfe_forward(&x, &ssm, &prior_with_lambda2(1.0), &default_branches(), 8)
            .unwrap();
        assert!(out.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn output_is_affine_in_the_weight_pair() {
        let dims = Dims::new(2, 3, 3);
        let x = test_volume(5, 2, dims);
        let mut rng = ParamRng::seed(6);
        let ssm = SsmParams::seeded(2, 4, &mut rng);
        let branches = default_branches();

        // λ2 = 0 gives 2·T, λ2 = 2 gives 2·U.
        let t2 = scfe_forward(&x, &ssm, &prior_with_lambda2(0.0), &branches, 32).unwrap();
        let u2 = scfe_forward(&x, &ssm, &prior_with_lambda2(2.0), &branches, 32).unwrap();

        for &lambda2 in &[0.17, 0.5, 0.64, 1.0, 1.93] {
            let got = scfe_forward(&x, &ssm, &prior_with_lambda2(lambda2), &branches, 32)
                .unwrap();
            let lambda1 = 2.0 - lambda2;
            for i in 0..got.data.len() {
                let expect = lambda1 * (t2.data[i] / 2.0) + lambda2 * (u2.data[i] / 2.0);
                assert!(
                    (got.data[i] - expect).abs() <= 1e-12,
                    "λ2={} entry {}",
                    lambda2,
                    i
                );
            }
        }
    }

    #[test]
    fn channel_mismatch_rejected() {
        let x = Volume::zeros(2, Dims::new(2, 2, 2));
        let mut rng = ParamRng::seed(7);
        let ssm = SsmParams::seeded(3, 2, &mut rng);
        assert!(scfe_forward(
            &x,
            &ssm,
            &prior_with_lambda2(1.0),
            &default_branches(),
            8
        )
        .is_err());
    }
}
