use std::path::{Path, PathBuf};
use std::process;

use clap::{Parser, Subcommand};
use nm_net::Model;
use nm_post::AffinityMap;
use nm_scan::{build_order, locality_metrics, ScanVariant};
use nm_tensor::{Dims, Resolution, Volume};

use nm_pipeline::io::volume_paths;
use nm_pipeline::{
    evaluate, gen_synth, oracle_segment, predict_tiled, read_f64_volume, read_label_volume,
    segment_affinities, tile_plan, write_f64_volume, write_label_volume, PipelineConfig,
    PipelineError, SegMethod,
};

#[derive(Parser)]
#[command(
    name = "neuromamba",
    about = "Affinity-based neuron instance segmentation pipeline",
    version
)]
struct Cli {
    /// JSON config file; omitted fields take built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads. Falls back to NEUROMAMBA_THREADS, then the config,
    /// then one thread per core.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic intensity volume with ground-truth labels.
    GenSynth {
        /// Volume extents as d,h,w.
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
        #[arg(long)]
        n_seeds: usize,
        /// Gaussian noise level added to the intensity image.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Output base path; labels land next to it with a `_gt` suffix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the model over a volume tile by tile and write affinities.
    Predict {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Checkpoint to load instead of seeded initialization.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Override the config block shape as d,h,w.
        #[arg(long, value_parser = parse_dims)]
        block: Option<Dims>,
    },
    /// Turn an affinity volume into instance labels.
    Segment {
        #[arg(long)]
        affinities: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        t_hi: Option<f64>,
        #[arg(long)]
        t_lo: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        /// Edge statistic driving agglomeration: mean or quantile75.
        #[arg(long)]
        merge_stat: Option<String>,
        /// Agglomeration back end: waterz or multicut.
        #[arg(long, default_value = "waterz")]
        method: String,
    },
    /// Compare a predicted labeling against a reference.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Also write the JSON record here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Score reference label 0 like any other region.
        #[arg(long)]
        include_background: bool,
    },
    /// Report locality statistics of the scan orders as CSV.
    ScanBench {
        /// Volume extents as d,h,w.
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
        /// Comma-separated variant names; defaults to the built-in set.
        #[arg(long)]
        scan_variants: Option<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment perfect affinities derived from a reference labeling.
    OracleSeg {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        t_hi: Option<f64>,
        #[arg(long)]
        t_lo: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
    },
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three extents d,h,w, got `{}`", s));
    }
    let mut v = [0usize; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("bad extent `{}`: {}", p.trim(), e))?;
    }
    Ok(Dims::new(v[0], v[1], v[2]))
}

fn check_dims(dims: Dims) -> Result<(), PipelineError> {
    dims.validate().map_err(|e| PipelineError::Config {
        detail: e.to_string(),
    })
}

fn resolve_threads(cli: Option<usize>, cfg: Option<usize>) -> Result<Option<usize>, PipelineError> {
    if let Some(t) = cli {
        return Ok(Some(t));
    }
    if let Ok(s) = std::env::var("NEUROMAMBA_THREADS") {
        let t = s
            .trim()
            .parse::<usize>()
            .map_err(|_| PipelineError::Config {
                detail: format!("NEUROMAMBA_THREADS=`{}` is not a thread count", s),
            })?;
        return Ok(Some(t));
    }
    Ok(cfg)
}

fn require_file(path: &Path) -> Result<(), PipelineError> {
    std::fs::metadata(path)
        .map(|_| ())
        .map_err(|e| PipelineError::from_io(e, path))
}

fn header_path_string(path: &Path) -> String {
    volume_paths(path).0.display().to_string()
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{}", e.record_json());
        process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let threads = resolve_threads(cli.threads, cfg.threads)?;
    if let Some(t) = threads {
        if t == 0 {
            return Err(PipelineError::Config {
                detail: "thread count must be nonzero".to_string(),
            });
        }
        // A second invocation in-process would find the pool already
        // built; the existing pool is fine to keep.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }

    match cli.cmd {
        Cmd::GenSynth {
            dims,
            n_seeds,
            sigma,
            out,
        } => {
            check_dims(dims)?;
            let (mut vol, seg) = gen_synth(dims, n_seeds, sigma, cfg.seed)?;
            vol.resolution = Some(Resolution {
                axial_nm: cfg.axial_nm,
                transverse_nm: cfg.transverse_nm,
            });
            let stem = out
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("synth")
                .to_string();
            let gt_path = out.with_file_name(format!("{}_gt", stem));
            write_f64_volume(&out, &vol)?;
            write_label_volume(&gt_path, &seg)?;
            println!(
                "{}",
                serde_json::json!({
                    "intensity": header_path_string(&out),
                    "labels": header_path_string(&gt_path),
                    "dims": dims.to_string(),
                    "n_seeds": n_seeds,
                })
            );
        }
        Cmd::Predict {
            input,
            out,
            weights,
            block,
        } => {
            if let Some(b) = block {
                cfg.block = [b.depth, b.height, b.width];
            }
            cfg.validate()?;
            let volume = read_f64_volume(&input)?;
            if volume.channels != cfg.in_channels {
                return Err(PipelineError::Domain {
                    detail: format!(
                        "model expects {} input channels, volume has {}",
                        cfg.in_channels, volume.channels
                    ),
                });
            }
            let plan = tile_plan(volume.dims, cfg.block_tuple())?;
            if plan.clamped {
                eprintln!(
                    "warning: block {:?} exceeds volume {}; clamped to {:?}",
                    cfg.block, volume.dims, plan.block
                );
            }
            let mc = cfg.model_config()?;
            let model = match &weights {
                Some(p) => {
                    require_file(p)?;
                    Model::load(mc, p)?
                }
                None => Model::build(mc)?,
            };
            let aff = predict_tiled(&volume, &model, &plan)?;
            let mut aff_vol = Volume::new(3, volume.dims, aff.data.clone()).map_err(|e| {
                PipelineError::Domain {
                    detail: e.to_string(),
                }
            })?;
            aff_vol.resolution = volume.resolution;
            write_f64_volume(&out, &aff_vol)?;
            println!(
                "{}",
                serde_json::json!({
                    "out": header_path_string(&out),
                    "dims": volume.dims.to_string(),
                    "tiles": plan.origins.len(),
                })
            );
        }
        Cmd::Segment {
            affinities,
            out,
            t_hi,
            t_lo,
            theta,
            merge_stat,
            method,
        } => {
            if let Some(v) = t_hi {
                cfg.t_hi = v;
            }
            if let Some(v) = t_lo {
                cfg.t_lo = v;
            }
            if let Some(v) = theta {
                cfg.theta = v;
            }
            if let Some(s) = merge_stat {
                cfg.merge_stat = s;
            }
            cfg.validate()?;
            let method: SegMethod = method.parse()?;
            let vol = read_f64_volume(&affinities)?;
            let aff = AffinityMap::from_volume(&vol)?;
            let seg = segment_affinities(
                &aff,
                cfg.t_hi,
                cfg.t_lo,
                cfg.theta,
                cfg.merge_stat()?,
                method,
            )?;
            write_label_volume(&out, &seg)?;
            println!(
                "{}",
                serde_json::json!({
                    "out": header_path_string(&out),
                    "segments": seg.num_segments(),
                    "method": method.to_string(),
                    "theta": cfg.theta,
                })
            );
        }
        Cmd::Eval {
            gt,
            pred,
            out,
            include_background,
        } => {
            let gt_seg = read_label_volume(&gt)?;
            let pred_seg = read_label_volume(&pred)?;
            let rec = evaluate(&gt_seg, &pred_seg, !include_background)?;
            let text = serde_json::to_string(&rec).map_err(|e| PipelineError::Io {
                detail: e.to_string(),
            })?;
            if let Some(p) = &out {
                std::fs::write(p, &text).map_err(|e| PipelineError::from_io(e, p))?;
            }
            println!("{}", text);
        }
        Cmd::ScanBench {
            dims,
            scan_variants,
            out,
        } => {
            check_dims(dims)?;
            let names: Vec<String> = match &scan_variants {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
                None => [
                    "transverse-primary",
                    "transverse-cross",
                    "axial-primary",
                    "axial-cross",
                    "hilbert",
                ]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            };
            if names.is_empty() {
                return Err(PipelineError::Config {
                    detail: "no scan variants requested".to_string(),
                });
            }
            let mut csv = String::from("variant,dims,mean_jump,p95_jump,adjacent_fraction\n");
            for name in &names {
                let variant: ScanVariant = name.parse().map_err(|e: nm_scan::ScanError| {
                    PipelineError::Config {
                        detail: e.to_string(),
                    }
                })?;
                let order = build_order(&variant, dims)?;
                let m = locality_metrics(&order);
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    name, dims, m.mean_jump, m.p95_jump, m.adjacent_fraction
                ));
            }
            match &out {
                Some(p) => {
                    std::fs::write(p, &csv).map_err(|e| PipelineError::from_io(e, p))?;
                }
                None => print!("{}", csv),
            }
        }
        Cmd::OracleSeg {
            gt,
            out,
            t_hi,
            t_lo,
            theta,
        } => {
            if let Some(v) = t_hi {
                cfg.t_hi = v;
            }
            if let Some(v) = t_lo {
                cfg.t_lo = v;
            }
            if let Some(v) = theta {
                cfg.theta = v;
            }
            cfg.validate()?;
            let gt_seg = read_label_volume(&gt)?;
            let seg = oracle_segment(&gt_seg, cfg.t_hi, cfg.t_lo, cfg.theta, cfg.merge_stat()?)?;
            write_label_volume(&out, &seg)?;
            let rec = evaluate(&gt_seg, &seg, true)?;
            println!(
                "{}",
                serde_json::json!({
                    "out": header_path_string(&out),
                    "segments": seg.num_segments(),
                    "vi": rec.vi,
                    "arand": rec.arand,
                })
            );
        }
    }
    Ok(())
}
