use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic parameter initializer. The same seed always yields the same
/// parameter stream, independent of platform and thread count.
#[derive(Debug, Clone)]
pub struct ParamRng {
    rng: ChaCha8Rng,
}

impl ParamRng {
    pub fn seed(seed: u64) -> Self {
        ParamRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// `n` draws from U(-a, a) with `a = sqrt(6 / (fan_in + fan_out))`.
    pub fn xavier_uniform(&mut self, n: usize, fan_in: usize, fan_out: usize) -> Vec<f64> {
        let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
        (0..n).map(|_| self.rng.gen_range(-a..a)).collect()
    }

    pub fn uniform(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.rng.gen_range(lo..hi)).collect()
    }
}
