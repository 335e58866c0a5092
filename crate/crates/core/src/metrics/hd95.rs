use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dsc::LabelIndex;
use super::edt::squared_edt;
use crate::error::Result;
use crate::par;
use crate::stats::percentile;
use crate::volume::{Dims, LabelVolume};

/// 95th-percentile Hausdorff distance for one structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Hd95 {
    Value(f64),
    /// Structure absent from both maps.
    Missing,
    /// Structure present in only one map: the grid diagonal in mm.
    Penalty(f64),
}

impl Hd95 {
    /// Numeric value used in means (penalties count, missing does not).
    pub fn value(&self) -> Option<f64> {
        match *self {
            Hd95::Value(v) | Hd95::Penalty(v) => Some(v),
            Hd95::Missing => None,
        }
    }
}

/// Voxels of `label` with at least one 6-neighbour that is outside the label
/// or outside the grid.
pub fn boundary_voxels(vol: &LabelVolume, label: u32) -> Vec<[usize; 3]> {
    let dims = vol.dims();
    let mask: Vec<bool> = vol.data.iter().map(|&l| l == label).collect();
    boundary_in(&mask, dims)
        .into_iter()
        .map(|i| dims.coords(i))
        .collect()
}

fn boundary_in(mask: &[bool], dims: Dims) -> Vec<usize> {
    let [nx, ny, nz] = dims.0;
    let slice = nx * ny;
    let parts = par::map_range(nz, |z| {
        let mut out = Vec::new();
        for y in 0..ny {
            for x in 0..nx {
                let i = x + y * nx + z * slice;
                if !mask[i] {
                    continue;
                }
                let edge = x == 0 || x + 1 == nx || y == 0 || y + 1 == ny || z == 0 || z + 1 == nz;
                if edge
                    || !mask[i - 1]
                    || !mask[i + 1]
                    || !mask[i - nx]
                    || !mask[i + nx]
                    || !mask[i - slice]
                    || !mask[i + slice]
                {
                    out.push(i);
                }
            }
        }
        out
    });
    parts.concat()
}

#[derive(Debug, Clone, Copy)]
struct BBox {
    lo: [usize; 3],
    hi: [usize; 3],
}

impl BBox {
    fn point(p: [usize; 3]) -> Self {
        BBox { lo: p, hi: p }
    }

    fn merge(self, o: BBox) -> BBox {
        BBox {
            lo: [0, 1, 2].map(|a| self.lo[a].min(o.lo[a])),
            hi: [0, 1, 2].map(|a| self.hi[a].max(o.hi[a])),
        }
    }

    fn grown(self, dims: Dims) -> BBox {
        BBox {
            lo: self.lo.map(|v| v.saturating_sub(1)),
            hi: [0, 1, 2].map(|a| (self.hi[a] + 1).min(dims.0[a] - 1)),
        }
    }

    fn dims(&self) -> Dims {
        Dims([0, 1, 2].map(|a| self.hi[a] - self.lo[a] + 1))
    }
}

fn merge_opt(a: Option<BBox>, b: Option<BBox>) -> Option<BBox> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.merge(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Per-slot bounding boxes of the requested labels in one pass.
fn label_boxes(vol: &LabelVolume, index: &LabelIndex, k: usize) -> Vec<Option<BBox>> {
    let dims = vol.dims();
    let slice = dims.slice_len();
    let parts = par::map_range(dims.nz(), |z| {
        let mut boxes: Vec<Option<BBox>> = vec![None; k + 1];
        for j in 0..slice {
            let s = index.slot(vol.data[z * slice + j]);
            if s == 0 {
                continue;
            }
            let p = [j % dims.nx(), j / dims.nx(), z];
            boxes[s] = merge_opt(boxes[s], Some(BBox::point(p)));
        }
        boxes
    });
    let mut out = vec![None; k + 1];
    for part in parts {
        for (o, p) in out.iter_mut().zip(part) {
            *o = merge_opt(*o, p);
        }
    }
    out
}

fn crop_mask(vol: &LabelVolume, label: u32, b: &BBox) -> Vec<bool> {
    let sub = b.dims();
    let dims = vol.dims();
    let mut mask = Vec::with_capacity(sub.len());
    for z in b.lo[2]..=b.hi[2] {
        for y in b.lo[1]..=b.hi[1] {
            let start = dims.index(b.lo[0], y, z);
            mask.extend(vol.data[start..start + sub.nx()].iter().map(|&l| l == label));
        }
    }
    mask
}

fn directed(from: &[usize], to_features: &[bool], sub: Dims, spacing: [f64; 3]) -> Vec<f64> {
    let d2 = squared_edt(to_features, sub, spacing);
    from.iter().map(|&i| d2[i].sqrt()).collect()
}

fn hd95_boxed(
    fixed: &LabelVolume,
    warped: &LabelVolume,
    label: u32,
    spacing: [f64; 3],
    fb: Option<BBox>,
    wb: Option<BBox>,
) -> Result<Hd95> {
    let dims = fixed.dims();
    let (fb, wb) = match (fb, wb) {
        (None, None) => return Ok(Hd95::Missing),
        (Some(f), Some(w)) => (f, w),
        _ => {
            let mut h = fixed.header.clone();
            h.spacing = spacing;
            return Ok(Hd95::Penalty(h.diagonal_mm()));
        }
    };
    let b = fb.merge(wb).grown(dims);
    let sub = b.dims();
    // Boundary tests inside the crop see out-of-crop neighbours as outside
    // the label; the crop is grown by one voxel, so that only happens at the
    // true grid edge.
    let ma = crop_mask(fixed, label, &b);
    let mb = crop_mask(warped, label, &b);
    let ba = boundary_in(&ma, sub);
    let bb = boundary_in(&mb, sub);
    let mut fa = vec![false; sub.len()];
    for &i in &ba {
        fa[i] = true;
    }
    let mut fbm = vec![false; sub.len()];
    for &i in &bb {
        fbm[i] = true;
    }
    drop(ma);
    drop(mb);
    let a_to_b = directed(&ba, &fbm, sub, spacing);
    let b_to_a = directed(&bb, &fa, sub, spacing);
    let p_ab = percentile(&a_to_b, 95.0)?;
    let p_ba = percentile(&b_to_a, 95.0)?;
    Ok(Hd95::Value(p_ab.max(p_ba)))
}

/// HD95 of one label: the larger of the two directed 95th percentiles of
/// boundary-to-boundary distances between voxel centres, in mm.
pub fn hd95(fixed: &LabelVolume, warped: &LabelVolume, label: u32, spacing: [f64; 3]) -> Result<Hd95> {
    Ok(hd95_labels(fixed, warped, &[label], spacing)?[&label])
}

/// HD95 for several labels; labels are processed concurrently.
pub fn hd95_labels(
    fixed: &LabelVolume,
    warped: &LabelVolume,
    labels: &[u32],
    spacing: [f64; 3],
) -> Result<BTreeMap<u32, Hd95>> {
    fixed.header.same_grid(&warped.header)?;
    let index = LabelIndex::new(labels);
    let k = labels.len();
    let fboxes = label_boxes(fixed, &index, k);
    let wboxes = label_boxes(warped, &index, k);
    let slots: Vec<usize> = (0..k).collect();
    let results = par::map_slice(&slots, |&s| {
        hd95_boxed(fixed, warped, labels[s], spacing, fboxes[s + 1], wboxes[s + 1])
    });
    labels
        .iter()
        .zip(results)
        .map(|(&l, r)| r.map(|v| (l, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::AffineHeader;

    fn vol(n: usize, f: impl Fn([usize; 3]) -> u32) -> LabelVolume {
        LabelVolume::from_fn(AffineHeader::isotropic(Dims::cube(n)), f).unwrap()
    }

    #[test]
    fn identical_shapes() {
        let a = vol(10, |[x, y, z]| u32::from(x > 2 && x < 7 && y > 1 && y < 8 && z > 3));
        assert_eq!(hd95(&a, &a, 1, [1.0; 3]).unwrap(), Hd95::Value(0.0));
    }

    #[test]
    fn single_voxels_three_apart() {
        let a = vol(10, |p| u32::from(p == [2, 5, 5]));
        let b = vol(10, |p| u32::from(p == [5, 5, 5]));
        assert_eq!(hd95(&a, &b, 1, [1.0; 3]).unwrap(), Hd95::Value(3.0));
        assert_eq!(hd95(&a, &b, 1, [2.0, 1.0, 1.0]).unwrap(), Hd95::Value(6.0));
    }

    #[test]
    fn absent_label_penalty_and_missing() {
        let a = vol(32, |[x, _, _]| u32::from(x < 4));
        let empty = vol(32, |_| 0);
        let expect = (3.0f64 * 31.0 * 31.0).sqrt();
        assert_eq!(hd95(&a, &empty, 1, [1.0; 3]).unwrap(), Hd95::Penalty(expect));
        assert_eq!(hd95(&empty, &a, 1, [1.0; 3]).unwrap(), Hd95::Penalty(expect));
        assert_eq!(hd95(&empty, &empty, 1, [1.0; 3]).unwrap(), Hd95::Missing);
    }

    #[test]
    fn boundary_counts_grid_edge() {
        let full = vol(3, |_| 1);
        // Only the centre voxel is interior.
        assert_eq!(boundary_voxels(&full, 1).len(), 26);
    }
}
