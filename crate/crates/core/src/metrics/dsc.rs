use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::volume::LabelVolume;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DscResult {
    /// `None` when the label is absent from both maps.
    pub per_label: BTreeMap<u32, Option<f64>>,
    /// Mean over labels that are not `None`.
    pub mean: Option<f64>,
}

/// Maps label values to dense slots.
pub(crate) enum LabelIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<u32, u32>),
}

impl LabelIndex {
    pub(crate) fn new(labels: &[u32]) -> Self {
        let max = labels.iter().copied().max().unwrap_or(0);
        if max <= 1 << 16 {
            let mut lut = vec![0u32; max as usize + 1];
            for (slot, &l) in labels.iter().enumerate() {
                lut[l as usize] = slot as u32 + 1;
            }
            LabelIndex::Dense(lut)
        } else {
            LabelIndex::Sparse(
                labels
                    .iter()
                    .enumerate()
                    .map(|(s, &l)| (l, s as u32 + 1))
                    .collect(),
            )
        }
    }

    /// Slot + 1, or 0 when the label was not requested.
    #[inline]
    pub(crate) fn slot(&self, label: u32) -> usize {
        match self {
            LabelIndex::Dense(lut) => lut.get(label as usize).copied().unwrap_or(0) as usize,
            LabelIndex::Sparse(m) => m.get(&label).copied().unwrap_or(0) as usize,
        }
    }
}

/// Dice overlap `2|A∩B| / (|A|+|B|)` per requested label.
pub fn dsc(fixed: &LabelVolume, warped: &LabelVolume, labels: &[u32]) -> Result<DscResult> {
    fixed.header.same_grid(&warped.header)?;
    if labels.is_empty() {
        return Err(Error::EmptyLabelList);
    }
    let index = LabelIndex::new(labels);
    let k = labels.len();
    let slice = fixed.dims().slice_len();
    let parts = par::map_range(fixed.dims().nz(), |z| {
        let mut counts = vec![[0u64; 3]; k + 1];
        let range = z * slice..(z + 1) * slice;
        for (&a, &b) in fixed.data[range.clone()].iter().zip(&warped.data[range]) {
            let sa = index.slot(a);
            let sb = index.slot(b);
            counts[sa][0] += 1;
            counts[sb][1] += 1;
            if a == b {
                counts[sa][2] += 1;
            }
        }
        counts
    });
    let mut counts = vec![[0u64; 3]; k + 1];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            for j in 0..3 {
                c[j] += p[j];
            }
        }
    }
    let mut per_label = BTreeMap::new();
    let mut present = Vec::new();
    for (slot, &label) in labels.iter().enumerate() {
        let [a, b, ab] = counts[slot + 1];
        let value = if a + b == 0 {
            None
        } else {
            Some(2.0 * ab as f64 / (a + b) as f64)
        };
        if let Some(v) = value {
            present.push(v);
        }
        per_label.insert(label, value);
    }
    Ok(DscResult {
        per_label,
        mean: crate::stats::mean(&present),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{AffineHeader, Dims};

    fn vol(n: usize, f: impl Fn([usize; 3]) -> u32) -> LabelVolume {
        LabelVolume::from_fn(AffineHeader::isotropic(Dims::cube(n)), f).unwrap()
    }

    #[test]
    fn identical_cube() {
        let a = vol(5, |[x, y, z]| u32::from((1..4).contains(&x) && (1..4).contains(&y) && (1..4).contains(&z)));
        let r = dsc(&a, &a, &[1]).unwrap();
        assert_eq!(r.per_label[&1], Some(1.0));
        assert_eq!(r.mean, Some(1.0));
    }

    #[test]
    fn disjoint_and_shifted_bar() {
        let a = vol(8, |[x, y, z]| u32::from(y == 0 && z == 0 && x < 4));
        let b = vol(8, |[x, y, z]| u32::from(y == 0 && z == 0 && (2..6).contains(&x)));
        let c = vol(8, |[x, y, z]| u32::from(y == 5 && z == 5 && x < 4));
        assert_eq!(dsc(&a, &b, &[1]).unwrap().per_label[&1], Some(0.5));
        assert_eq!(dsc(&a, &c, &[1]).unwrap().per_label[&1], Some(0.0));
    }

    #[test]
    fn missing_labels_are_excluded() {
        let a = vol(4, |[x, _, _]| u32::from(x == 0));
        let r = dsc(&a, &a, &[1, 7]).unwrap();
        assert_eq!(r.per_label[&7], None);
        assert_eq!(r.mean, Some(1.0));
        let empty = vol(4, |_| 0);
        assert_eq!(dsc(&a, &empty, &[1]).unwrap().per_label[&1], Some(0.0));
    }

    #[test]
    fn errors() {
        let a = vol(4, |_| 1);
        let b = vol(5, |_| 1);
        assert!(matches!(dsc(&a, &b, &[1]), Err(Error::DimMismatch(..))));
        assert!(matches!(dsc(&a, &a, &[]), Err(Error::EmptyLabelList)));
    }

    #[test]
    fn sparse_labels() {
        let a = vol(3, |[x, _, _]| if x == 1 { 1_000_000 } else { 0 });
        let r = dsc(&a, &a, &[1_000_000]).unwrap();
        assert_eq!(r.mean, Some(1.0));
    }
}
