use nm_post::Segmentation;
use nm_tensor::{Dims, Volume};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::PipelineError;

/// Intensity inside a region.
pub const SYNTH_INSIDE: f64 = 0.9;
/// Intensity on a region boundary (any 6-neighbor with another label).
pub const SYNTH_BOUNDARY: f64 = 0.1;

/// Deterministic synthetic volume: a Voronoi partition around uniformly
/// sampled distinct seed voxels (labels 1..=n_seeds, squared Euclidean
/// distance on the voxel grid, earlier seed wins ties), and an intensity
/// image that is dark on label boundaries and bright inside, plus
/// optional Gaussian noise.
pub fn gen_synth(
    dims: Dims,
    n_seeds: usize,
    sigma: f64,
    seed: u64,
) -> Result<(Volume, Segmentation), PipelineError> {
    dims.validate().map_err(|e| PipelineError::Domain {
        detail: e.to_string(),
    })?;
    if n_seeds == 0 {
        return Err(PipelineError::Config {
            detail: "need at least one seed".to_string(),
        });
    }
    if n_seeds > dims.n() {
        return Err(PipelineError::Config {
            detail: format!("{} seeds exceed {} voxels", n_seeds, dims.n()),
        });
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(PipelineError::Config {
            detail: format!("noise sigma {} must be finite and nonnegative", sigma),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = rand::seq::index::sample(&mut rng, dims.n(), n_seeds);
    let seeds: Vec<(i64, i64, i64)> = picks
        .iter()
        .map(|flat| {
            let (d, h, w) = dims.coords(flat);
            (d as i64, h as i64, w as i64)
        })
        .collect();

    let mut labels = vec![0u64; dims.n()];
    for d in 0..dims.depth {
        for h in 0..dims.height {
            for w in 0..dims.width {
                let mut best = u64::MAX;
                let mut best_k = 0usize;
                for (k, (sd, sh, sw)) in seeds.iter().enumerate() {
                    let dd = d as i64 - sd;
                    let dh = h as i64 - sh;
                    let dw = w as i64 - sw;
                    let dist = (dd * dd + dh * dh + dw * dw) as u64;
                    if dist < best {
                        best = dist;
                        best_k = k;
                    }
                }
                labels[dims.flat(d, h, w)] = best_k as u64 + 1;
            }
        }
    }
    let seg = Segmentation { dims, labels };

    let mut intensity = Volume::zeros(1, dims);
    let noise = if sigma > 0.0 {
        Some(Normal::new(0.0, sigma).map_err(|e| PipelineError::Config {
            detail: e.to_string(),
        })?)
    } else {
        None
    };
    for d in 0..dims.depth {
        for h in 0..dims.height {
            for w in 0..dims.width {
                let l = seg.get(d, h, w);
                let mut boundary = false;
                if d > 0 && seg.get(d - 1, h, w) != l {
                    boundary = true;
                }
                if !boundary && d + 1 < dims.depth && seg.get(d + 1, h, w) != l {
                    boundary = true;
                }
                if !boundary && h > 0 && seg.get(d, h - 1, w) != l {
                    boundary = true;
                }
                if !boundary && h + 1 < dims.height && seg.get(d, h + 1, w) != l {
                    boundary = true;
                }
                if !boundary && w > 0 && seg.get(d, h, w - 1) != l {
                    boundary = true;
                }
                if !boundary && w + 1 < dims.width && seg.get(d, h, w + 1) != l {
                    boundary = true;
                }
                let base = if boundary { SYNTH_BOUNDARY } else { SYNTH_INSIDE };
                let v = match &noise {
                    Some(n) => base + n.sample(&mut rng),
                    None => base,
                };
                intensity.set(0, d, h, w, v);
            }
        }
    }
    Ok((intensity, seg))
}
