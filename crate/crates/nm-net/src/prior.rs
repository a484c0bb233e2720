use nm_tensor::Resolution;

use crate::error::NetError;

pub const DEFAULT_ALPHA: f64 = 0.04;
pub const DEFAULT_BETA: f64 = 0.6;

/// Voxel anisotropy and the branch-weight schedule derived from it.
///
/// The anisotropy degree is `D_ani = R_a / R_t`; the axial branch weight is
/// `λ2 = clamp(α·D_ani + β, 0, 2)` and the transverse weight `λ1 = 2 − λ2`,
/// so the pair always sums to 2 exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionPrior {
    pub r_a: f64,
    pub r_t: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ResolutionPrior {
    pub fn new(r_a: f64, r_t: f64) -> Result<ResolutionPrior, NetError> {
        ResolutionPrior::with_schedule(r_a, r_t, DEFAULT_ALPHA, DEFAULT_BETA)
    }

    pub fn with_schedule(
        r_a: f64,
        r_t: f64,
        alpha: f64,
        beta: f64,
    ) -> Result<ResolutionPrior, NetError> {
        if !(r_a > 0.0) || !(r_t > 0.0) {
            return Err(NetError::InvalidConfig(format!(
                "resolutions must be positive, got axial {} transverse {}",
                r_a, r_t
            )));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(NetError::InvalidConfig(
                "schedule coefficients must be finite".to_string(),
            ));
        }
        Ok(ResolutionPrior {
            r_a,
            r_t,
            alpha,
            beta,
        })
    }

    pub fn from_resolution(res: Resolution) -> Result<ResolutionPrior, NetError> {
        ResolutionPrior::new(res.axial_nm, res.transverse_nm)
    }

    pub fn anisotropy(&self) -> f64 {
        self.r_a / self.r_t
    }

    pub fn lambdas(&self) -> (f64, f64) {
        compute_lambdas(self)
    }
}

/// (λ1, λ2) of the schedule. λ1 is defined as 2 − λ2, so the sum is exact.
pub fn compute_lambdas(prior: &ResolutionPrior) -> (f64, f64) {
    let lambda2 = (prior.alpha * prior.anisotropy() + prior.beta).clamp(0.0, 2.0);
    (2.0 - lambda2, lambda2)
}
