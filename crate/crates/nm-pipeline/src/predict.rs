use nm_net::Model;
use nm_post::AffinityMap;
use nm_tensor::{Dims, Volume};
use rayon::prelude::*;

use crate::error::PipelineError;
use crate::tile::TilePlan;

/// Copy a block out of a volume, keeping channel count and resolution.
pub fn copy_block(v: &Volume, origin: (usize, usize, usize), block: (usize, usize, usize)) -> Volume {
    let out_dims = Dims::new(block.0, block.1, block.2);
    let mut out = Volume::zeros(v.channels, out_dims);
    out.resolution = v.resolution;
    for c in 0..v.channels {
        for d in 0..block.0 {
            for h in 0..block.1 {
                let src_base = c * v.dims.n() + v.dims.flat(origin.0 + d, origin.1 + h, origin.2);
                let dst_base = c * out_dims.n() + out_dims.flat(d, h, 0);
                out.data[dst_base..dst_base + block.2]
                    .copy_from_slice(&v.data[src_base..src_base + block.2]);
            }
        }
    }
    out
}

/// Run the model on every tile and blend the overlapping outputs by
/// uniform averaging. Tiles may evaluate in parallel; accumulation runs
/// in tile-index order, so the result is identical for any thread count.
pub fn predict_tiled(
    volume: &Volume,
    model: &Model,
    plan: &TilePlan,
) -> Result<AffinityMap, PipelineError> {
    if volume.dims != plan.dims {
        return Err(PipelineError::Domain {
            detail: format!("tile plan is for {}, volume is {}", plan.dims, volume.dims),
        });
    }
    let preds: Vec<Volume> = plan
        .origins
        .par_iter()
        .map(|o| model.forward(&copy_block(volume, *o, plan.block)))
        .collect::<Result<_, _>>()?;

    let n = volume.dims.n();
    let mut acc = vec![0.0f64; 3 * n];
    for (origin, pred) in plan.origins.iter().zip(&preds) {
        for c in 0..3 {
            for d in 0..plan.block.0 {
                for h in 0..plan.block.1 {
                    for w in 0..plan.block.2 {
                        let gi = volume
                            .dims
                            .flat(origin.0 + d, origin.1 + h, origin.2 + w);
                        acc[c * n + gi] += pred.get(c, d, h, w) / plan.coverage[gi] as f64;
                    }
                }
            }
        }
    }
    Ok(AffinityMap::new(volume.dims, acc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tile::tile_plan;
    use nm_net::{Model, ModelConfig, ResolutionPrior};

    fn tiny_model(seed: u64) -> Model {
        let prior = ResolutionPrior::new(40.0, 4.0).unwrap();
        let mut cfg = ModelConfig::new(prior, seed);
        cfg.widths = vec![2, 4];
        cfg.n_state = 2;
        cfg.chunk = 64;
        Model::build(cfg).unwrap()
    }

    fn ramp(dims: Dims) -> Volume {
        Volume::from_fn(1, dims, |_, d, h, w| ((d * 31 + h * 7 + w) % 13) as f64 / 13.0)
    }

    #[test]
    fn copy_block_extracts_the_right_window() {
        let v = Volume::from_fn(2, Dims::new(3, 4, 5), |c, d, h, w| {
            (c * 1000 + d * 100 + h * 10 + w) as f64
        });
        let b = copy_block(&v, (1, 2, 3), (2, 2, 2));
        assert_eq!(b.dims, Dims::new(2, 2, 2));
        assert_eq!(b.get(0, 0, 0, 0), 123.0);
        assert_eq!(b.get(1, 1, 1, 1), 1234.0);
    }

    #[test]
    fn single_tile_equals_direct_forward() {
        let dims = Dims::new(2, 8, 8);
        let v = ramp(dims);
        let model = tiny_model(5);
        let plan = tile_plan(dims, (2, 8, 8)).unwrap();
        let tiled = predict_tiled(&v, &model, &plan).unwrap();
        let direct = model.forward(&v).unwrap();
        assert_eq!(tiled.data, direct.data);
    }

    #[test]
    fn overlapping_tiles_blend_into_valid_affinities() {
        let dims = Dims::new(2, 8, 16);
        let v = ramp(dims);
        let model = tiny_model(6);
        let plan = tile_plan(dims, (2, 8, 8)).unwrap();
        assert!(plan.origins.len() > 1);
        let out = predict_tiled(&v, &model, &plan).unwrap();
        assert!(out.data.iter().all(|a| *a > 0.0 && *a < 1.0));
    }

    #[test]
    fn deterministic_across_runs() {
        let dims = Dims::new(2, 8, 12);
        let v = ramp(dims);
        let model = tiny_model(7);
        let plan = tile_plan(dims, (2, 8, 8)).unwrap();
        let a = predict_tiled(&v, &model, &plan).unwrap();
        let b = predict_tiled(&v, &model, &plan).unwrap();
        let ab: Vec<u64> = a.data.iter().map(|x| x.to_bits()).collect();
        let bb: Vec<u64> = b.data.iter().map(|x| x.to_bits()).collect();
        assert_eq!(ab, bb);
    }
}
