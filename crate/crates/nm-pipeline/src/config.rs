use std::path::Path;

use nm_net::{ModelConfig, ResolutionPrior, DEFAULT_ALPHA, DEFAULT_BETA};
use nm_post::{MergeStat, DEFAULT_THETA, DEFAULT_T_HI, DEFAULT_T_LO};
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;

/// Everything a run needs, JSON-serializable. Every field has a default,
/// so partial config files stay valid.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub in_channels: usize,
    pub widths: Vec<usize>,
    pub n_state: usize,
    pub chunk: usize,
    /// Voxel pitch in nanometers, axial then transverse.
    pub axial_nm: f64,
    pub transverse_nm: f64,
    /// Coefficients of the anisotropy-driven branch weighting.
    pub alpha: f64,
    pub beta: f64,
    /// Scan mechanism name from the built-in registry.
    pub mechanism: String,
    pub block: [usize; 3],
    pub t_hi: f64,
    pub t_lo: f64,
    pub theta: f64,
    pub merge_stat: String,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            in_channels: 1,
            widths: vec![16, 32, 64],
            n_state: 8,
            chunk: 2048,
            axial_nm: 40.0,
            transverse_nm: 4.0,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            mechanism: nm_scan::DEFAULT_MECHANISM.to_string(),
            block: [18, 160, 160],
            t_hi: DEFAULT_T_HI,
            t_lo: DEFAULT_T_LO,
            theta: DEFAULT_THETA,
            merge_stat: "mean".to_string(),
            seed: 0,
            threads: None,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::from_io(e, path))?;
        let cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| PipelineError::Config {
                detail: format!("{}: {}", path.display(), e),
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.prior()?;
        self.model_config()?;
        self.merge_stat()?;
        for (name, v) in [("t_hi", self.t_hi), ("t_lo", self.t_lo), ("theta", self.theta)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(PipelineError::Config {
                    detail: format!("{} = {} outside [0,1]", name, v),
                });
            }
        }
        if self.t_lo > self.t_hi {
            return Err(PipelineError::Config {
                detail: format!("t_lo {} exceeds t_hi {}", self.t_lo, self.t_hi),
            });
        }
        if self.block.iter().any(|b| *b == 0) {
            return Err(PipelineError::Config {
                detail: format!("block {:?} has a zero axis", self.block),
            });
        }
        Ok(())
    }

    pub fn prior(&self) -> Result<ResolutionPrior, PipelineError> {
        ResolutionPrior::with_schedule(self.axial_nm, self.transverse_nm, self.alpha, self.beta)
            .map_err(|e| PipelineError::Config {
                detail: e.to_string(),
            })
    }

    pub fn model_config(&self) -> Result<ModelConfig, PipelineError> {
        let mut mc = ModelConfig::new(self.prior()?, self.seed);
        mc.in_channels = self.in_channels;
        mc.widths = self.widths.clone();
        mc.n_state = self.n_state;
        mc.chunk = self.chunk;
        mc.mechanism = self.mechanism.clone();
        mc.validate().map_err(|e| PipelineError::Config {
            detail: e.to_string(),
        })?;
        Ok(mc)
    }

    pub fn merge_stat(&self) -> Result<MergeStat, PipelineError> {
        self.merge_stat
            .parse()
            .map_err(|_| PipelineError::Config {
                detail: format!("unknown merge stat {:?}", self.merge_stat),
            })
    }

    pub fn block_tuple(&self) -> (usize, usize, usize) {
        (self.block[0], self.block[1], self.block[2])
    }
}
