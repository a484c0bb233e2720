use nm_tensor::ParamRng;

use crate::error::SsmError;

/// Test-only override that pins the input-dependent projections to
/// constants: `delta` is used directly (softplus already applied), `b` and
/// `c` fill every state entry. Makes the recurrence linear in x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstProjection {
    pub delta: f64,
    pub b: f64,
    pub c: f64,
}

/// Parameters of the selective scan over a C-channel sequence with an
/// N-state diagonal recurrence per channel.
///
/// Projections are bias-free linear maps of the per-step channel vector:
/// `w_delta` is C×C (softplus applied after), `w_b` and `w_c` are N×C,
/// all row-major. `a` is C×N, strictly negative so `exp(Δ·a) < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SsmParams {
    pub channels: usize,
    pub n_state: usize,
    pub a: Vec<f64>,
    pub w_delta: Vec<f64>,
    pub w_b: Vec<f64>,
    pub w_c: Vec<f64>,
    pub d_skip: Vec<f64>,
    pub const_proj: Option<ConstProjection>,
}

impl SsmParams {
    /// Deterministic init: `a[c][n] = -(n+1)`, Xavier-uniform projections,
    /// unit skip gains.
    pub fn seeded(channels: usize, n_state: usize, rng: &mut ParamRng) -> SsmParams {
        let mut a = Vec::with_capacity(channels * n_state);
        for _ in 0..channels {
            for n in 0..n_state {
                a.push(-((n + 1) as f64));
            }
        }
        SsmParams {
            channels,
            n_state,
            a,
            w_delta: rng.xavier_uniform(channels * channels, channels, channels),
            w_b: rng.xavier_uniform(n_state * channels, channels, n_state),
            w_c: rng.xavier_uniform(n_state * channels, channels, n_state),
            d_skip: vec![1.0; channels],
            const_proj: None,
        }
    }

    pub fn validate(&self) -> Result<(), SsmError> {
        if self.channels == 0 || self.n_state == 0 {
            return Err(SsmError::InvalidParams(
                "channel and state counts must be nonzero".to_string(),
            ));
        }
        let checks = [
            ("a", self.a.len(), self.channels * self.n_state),
            (
                "w_delta",
                self.w_delta.len(),
                self.channels * self.channels,
            ),
            ("w_b", self.w_b.len(), self.n_state * self.channels),
            ("w_c", self.w_c.len(), self.n_state * self.channels),
            ("d_skip", self.d_skip.len(), self.channels),
        ];
        for (what, got, expected) in checks {
            if got != expected {
                return Err(SsmError::ShapeMismatch {
                    what,
                    expected,
                    got,
                });
            }
        }
        if self.a.iter().any(|v| !(*v < 0.0)) {
            return Err(SsmError::InvalidParams(
                "state matrix entries must be strictly negative".to_string(),
            ));
        }
        Ok(())
    }
}

/// Hidden state of the recurrence: C×N, row-major per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanState {
    pub h: Vec<f64>,
}

impl ScanState {
    pub fn zeros(channels: usize, n_state: usize) -> ScanState {
        ScanState {
            h: vec![0.0; channels * n_state],
        }
    }
}
