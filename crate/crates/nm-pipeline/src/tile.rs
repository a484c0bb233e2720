use nm_tensor::Dims;

use crate::error::PipelineError;

/// Sliding-block coverage of a volume. Per axis the stride is the block
/// minus half the block (floored), and the final tile snaps back to the
/// boundary instead of padding, which can only deepen the overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct TilePlan {
    pub dims: Dims,
    pub block: (usize, usize, usize),
    /// Tile origins, depth-major cartesian order.
    pub origins: Vec<(usize, usize, usize)>,
    /// Number of tiles covering each voxel; ≥ 1 everywhere.
    pub coverage: Vec<u32>,
    /// True when the requested block exceeded the volume on some axis.
    pub clamped: bool,
}

fn axis_origins(extent: usize, block: usize) -> Vec<usize> {
    let stride = block - block / 2;
    let mut v = Vec::new();
    let mut o = 0;
    while o + block < extent {
        v.push(o);
        o += stride;
    }
    v.push(extent - block);
    v
}

pub fn tile_plan(dims: Dims, block: (usize, usize, usize)) -> Result<TilePlan, PipelineError> {
    dims.validate().map_err(|e| PipelineError::Domain {
        detail: e.to_string(),
    })?;
    if block.0 == 0 || block.1 == 0 || block.2 == 0 {
        return Err(PipelineError::Config {
            detail: format!("block {:?} has a zero axis", block),
        });
    }
    let clamped = block.0 > dims.depth || block.1 > dims.height || block.2 > dims.width;
    let block = (
        block.0.min(dims.depth),
        block.1.min(dims.height),
        block.2.min(dims.width),
    );
    let ds = axis_origins(dims.depth, block.0);
    let hs = axis_origins(dims.height, block.1);
    let ws = axis_origins(dims.width, block.2);
    let mut origins = Vec::with_capacity(ds.len() * hs.len() * ws.len());
    for d in &ds {
        for h in &hs {
            for w in &ws {
                origins.push((*d, *h, *w));
            }
        }
    }
    let mut coverage = vec![0u32; dims.n()];
    for (od, oh, ow) in &origins {
        for d in *od..od + block.0 {
            for h in *oh..oh + block.1 {
                for w in *ow..ow + block.2 {
                    coverage[dims.flat(d, h, w)] += 1;
                }
            }
        }
    }
    debug_assert!(coverage.iter().all(|c| *c >= 1));
    Ok(TilePlan {
        dims,
        block,
        origins,
        coverage,
        clamped,
    })
}

impl TilePlan {
    /// Sum of blend weights at every voxel; 1 within float error by the
    /// uniform-averaging rule (each covering tile contributes
    /// 1/coverage).
    pub fn weight_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0f64; self.dims.n()];
        for (od, oh, ow) in &self.origins {
            for d in *od..od + self.block.0 {
                for h in *oh..oh + self.block.1 {
                    for w in *ow..ow + self.block.2 {
                        let i = self.dims.flat(d, h, w);
                        sums[i] += 1.0 / self.coverage[i] as f64;
                    }
                }
            }
        }
        sums
    }
}
