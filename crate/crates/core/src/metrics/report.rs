use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{dsc, hd95_labels, ndv, tre, Hd95};
use crate::error::Result;
use crate::stats::mean;
use crate::volio::LandmarkSet;
use crate::volume::{DisplacementField, LabelVolume};
use crate::warp::warp_labels;

/// Metric record for one registered pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub method_id: String,
    pub pair_id: String,
    /// `null` for labels absent from both maps.
    pub dsc_per_label: BTreeMap<u32, Option<f64>>,
    pub dsc_mean: Option<f64>,
    /// mm; `null` for labels absent from both maps.
    pub hd95_per_label: BTreeMap<u32, Option<f64>>,
    /// Labels whose HD95 is the diagonal penalty.
    pub hd95_penalized: Vec<u32>,
    pub hd95_mean: Option<f64>,
    pub tre_per_landmark: Vec<f64>,
    pub tre_mean: Option<f64>,
    pub ndv: f64,
    pub ic_mae: Option<f64>,
    pub runtime_s: Option<f64>,
}

/// Inputs of one evaluation. Optional parts default to: labels = union of the
/// nonzero labels of both maps, mask = fixed foreground, no landmarks.
#[derive(Debug, Clone, Copy)]
pub struct PairInputs<'a> {
    pub fixed_seg: &'a LabelVolume,
    pub moving_seg: &'a LabelVolume,
    pub phi: &'a DisplacementField,
    pub labels: Option<&'a [u32]>,
    pub landmarks: Option<(&'a LandmarkSet, &'a LandmarkSet)>,
    pub mask: Option<&'a LabelVolume>,
}

impl<'a> PairInputs<'a> {
    pub fn new(fixed_seg: &'a LabelVolume, moving_seg: &'a LabelVolume, phi: &'a DisplacementField) -> Self {
        PairInputs {
            fixed_seg,
            moving_seg,
            phi,
            labels: None,
            landmarks: None,
            mask: None,
        }
    }
}

/// Warps the moving labels through `phi` and computes every per-pair metric.
pub fn evaluate_pair(method_id: &str, pair_id: &str, inputs: PairInputs<'_>) -> Result<PairReport> {
    let PairInputs {
        fixed_seg,
        moving_seg,
        phi,
        labels,
        landmarks,
        mask,
    } = inputs;
    fixed_seg.header.same_grid(&moving_seg.header)?;
    fixed_seg.header.same_grid(&phi.header)?;
    let labels: Vec<u32> = match labels {
        Some(l) => l.to_vec(),
        None => fixed_seg
            .labels()
            .into_iter()
            .chain(moving_seg.labels())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let spacing = fixed_seg.header.spacing;
    let warped = warp_labels(moving_seg, phi);

    let overlap = dsc(fixed_seg, &warped, &labels)?;
    let hd = hd95_labels(fixed_seg, &warped, &labels, spacing)?;
    let hd95_penalized = hd
        .iter()
        .filter(|(_, h)| matches!(h, Hd95::Penalty(_)))
        .map(|(&l, _)| l)
        .collect();
    let hd95_per_label: BTreeMap<u32, Option<f64>> = hd.iter().map(|(&l, h)| (l, h.value())).collect();
    let hd_values: Vec<f64> = hd95_per_label.values().filter_map(|v| *v).collect();

    let tre_per_landmark = match landmarks {
        Some((f, m)) => tre(f, m, phi, spacing)?,
        None => Vec::new(),
    };
    let folded = match mask {
        Some(m) => ndv(phi, m)?,
        None => ndv(phi, &fixed_seg.foreground())?,
    };

    Ok(PairReport {
        method_id: method_id.to_string(),
        pair_id: pair_id.to_string(),
        dsc_per_label: overlap.per_label,
        dsc_mean: overlap.mean,
        hd95_per_label,
        hd95_penalized,
        hd95_mean: mean(&hd_values),
        tre_mean: mean(&tre_per_landmark),
        tre_per_landmark,
        ndv: folded,
        ic_mae: None,
        runtime_s: None,
    })
}
