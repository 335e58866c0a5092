use crate::error::{Error, Result};
use crate::par;
use crate::volume::{DisplacementField, LabelVolume};

/// Six tetrahedra sharing the main diagonal of the unit cell. Corner `k` sits
/// at offset `(k & 1, k >> 1 & 1, k >> 2 & 1)`; every tetrahedron has
/// volume +1/6 under the identity map.
pub const KUHN_TETS: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 5, 1, 7],
    [0, 3, 2, 7],
    [0, 6, 4, 7],
];

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn tet_volume(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    let (u, v, w) = (sub(b, a), sub(c, a), sub(d, a));
    (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0]))
        / 6.0
}

/// Folded fraction of the masked volume. Every voxel anchors the unit cell
/// spanning it and its +x/+y/+z neighbours; corners past the last index reuse
/// the displacement of the nearest in-grid voxel. A cell counts when its
/// anchor voxel is in the mask.
pub fn ndv(phi: &DisplacementField, mask: &LabelVolume) -> Result<f64> {
    phi.header.same_grid(&mask.header)?;
    let mask_count = mask.count_nonzero();
    if mask_count == 0 {
        return Err(Error::EmptyMask);
    }
    let dims = phi.dims();
    let [nx, ny, nz] = dims.0;
    let parts = par::map_range(nz, |z| {
        let mut folded = 0.0;
        for y in 0..ny {
            for x in 0..nx {
                if mask.data[dims.index(x, y, z)] == 0 {
                    continue;
                }
                let mut corners = [[0.0; 3]; 8];
                for (k, c) in corners.iter_mut().enumerate() {
                    let o = [k & 1, (k >> 1) & 1, (k >> 2) & 1];
                    let p = [x + o[0], y + o[1], z + o[2]];
                    let u = phi.data[dims.index(p[0].min(nx - 1), p[1].min(ny - 1), p[2].min(nz - 1))];
                    *c = [p[0] as f64 + u[0], p[1] as f64 + u[1], p[2] as f64 + u[2]];
                }
                for t in &KUHN_TETS {
                    let v = tet_volume(corners[t[0]], corners[t[1]], corners[t[2]], corners[t[3]]);
                    if v < 0.0 {
                        folded -= v;
                    }
                }
            }
        }
        folded
    });
    Ok(par::ordered_sum(&parts) / mask_count as f64)
}
