use std::str::FromStr;

use nm_metrics::{adapted_rand_error, contingency, variation_of_information};
use nm_post::{
    affinity_from_labels, agglomerate_waterz, multicut_gaec, watershed_fragments, AffinityMap,
    MergeStat, Segmentation,
};
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;

/// Agglomeration back end applied to watershed fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegMethod {
    Waterz,
    Multicut,
}

impl FromStr for SegMethod {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<SegMethod, PipelineError> {
        match s {
            "waterz" => Ok(SegMethod::Waterz),
            "multicut" => Ok(SegMethod::Multicut),
            other => Err(PipelineError::Config {
                detail: format!("unknown segmentation method `{}`", other),
            }),
        }
    }
}

impl std::fmt::Display for SegMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SegMethod::Waterz => write!(f, "waterz"),
            SegMethod::Multicut => write!(f, "multicut"),
        }
    }
}

/// Full affinity-to-instances stage: threshold watershed for fragments,
/// then graph agglomeration with the chosen back end.
pub fn segment_affinities(
    aff: &AffinityMap,
    t_hi: f64,
    t_lo: f64,
    theta: f64,
    stat: MergeStat,
    method: SegMethod,
) -> Result<Segmentation, PipelineError> {
    let frags = watershed_fragments(aff, t_hi, t_lo)?;
    let seg = match method {
        SegMethod::Waterz => agglomerate_waterz(&frags, aff, theta, stat)?,
        SegMethod::Multicut => multicut_gaec(&frags, aff, theta)?,
    };
    Ok(seg)
}

/// Round-trip check: derive perfect affinities from a labeling and
/// segment them back. Useful for exercising the instance stage without a
/// trained predictor.
pub fn oracle_segment(
    gt: &Segmentation,
    t_hi: f64,
    t_lo: f64,
    theta: f64,
    stat: MergeStat,
) -> Result<Segmentation, PipelineError> {
    let aff = affinity_from_labels(gt);
    segment_affinities(&aff, t_hi, t_lo, theta, stat, SegMethod::Waterz)
}

/// Evaluation summary for a predicted labeling against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub vi_split: f64,
    pub vi_merge: f64,
    pub vi: f64,
    pub arand: f64,
}

pub fn evaluate(
    gt: &Segmentation,
    pred: &Segmentation,
    ignore_background: bool,
) -> Result<EvalRecord, PipelineError> {
    let tab = contingency(gt, pred, ignore_background)?;
    let (vi_split, vi_merge, vi) = variation_of_information(&tab)?;
    let arand = adapted_rand_error(&tab)?;
    Ok(EvalRecord {
        vi_split,
        vi_merge,
        vi,
        arand,
    })
}
