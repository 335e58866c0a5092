//! Displacement-field algebra on voxel grids.
//!
//! Boundary policy is clamp-to-edge throughout: a coordinate outside
//! `[0, n-1]` reads the value at the nearest edge voxel, which makes every
//! sampling operation total.

use crate::error::{Error, Result};
use crate::par;
use crate::volume::{
    AffineHeader, Dims, DisplacementField, LabelVolume, ScalarVolume, VelocityField,
};

/// Default number of squarings for the SVF exponential.
pub const DEFAULT_SQUARINGS: u32 = 7;

pub(crate) trait Sample: Copy + Send + Sync {
    fn lerp(a: Self, b: Self, t: f64) -> Self;
}

impl Sample for f64 {
    #[inline(always)]
    fn lerp(a: f64, b: f64, t: f64) -> f64 {
        a + t * (b - a)
    }
}

impl Sample for [f64; 3] {
    #[inline(always)]
    fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
        [
            a[0] + t * (b[0] - a[0]),
            a[1] + t * (b[1] - a[1]),
            a[2] + t * (b[2] - a[2]),
        ]
    }
}

/// Lower corner, upper corner and fractional offset along one axis after
/// clamping to `[0, n-1]`. The last voxel is returned as a degenerate cell
/// with zero offset so that integer coordinates read stored values exactly.
#[inline(always)]
pub(crate) fn axis_cell(p: f64, n: usize) -> (usize, usize, f64) {
    let last = n - 1;
    if p >= last as f64 {
        return (last, last, 0.0);
    }
    if p <= 0.0 {
        return (0, 1.min(last), 0.0);
    }
    let i0 = p as usize;
    (i0, i0 + 1, p - i0 as f64)
}

#[inline(always)]
pub(crate) fn trilinear<T: Sample>(data: &[T], dims: Dims, p: [f64; 3]) -> T {
    let (x0, x1, tx) = axis_cell(p[0], dims.nx());
    let (y0, y1, ty) = axis_cell(p[1], dims.ny());
    let (z0, z1, tz) = axis_cell(p[2], dims.nz());
    let nx = dims.nx();
    let sxy = nx * dims.ny();
    let at = |x: usize, y: usize, z: usize| data[x + nx * y + sxy * z];
    let c00 = T::lerp(at(x0, y0, z0), at(x1, y0, z0), tx);
    let c10 = T::lerp(at(x0, y1, z0), at(x1, y1, z0), tx);
    let c01 = T::lerp(at(x0, y0, z1), at(x1, y0, z1), tx);
    let c11 = T::lerp(at(x0, y1, z1), at(x1, y1, z1), tx);
    let c0 = T::lerp(c00, c10, ty);
    let c1 = T::lerp(c01, c11, ty);
    T::lerp(c0, c1, tz)
}

/// Trilinear value and its spatial gradient with respect to `p`.
///
/// Along an axis where `p` was clamped the derivative is zero.
#[inline]
pub(crate) fn trilinear_with_gradient(data: &[f64], dims: Dims, p: [f64; 3]) -> (f64, [f64; 3]) {
    let n = dims.0;
    let mut cells = [(0usize, 0usize, 0.0f64); 3];
    let mut live = [false; 3];
    for a in 0..3 {
        cells[a] = axis_cell(p[a], n[a]);
        live[a] = n[a] > 1 && p[a] > 0.0 && p[a] < (n[a] - 1) as f64;
    }
    let (x0, x1, tx) = cells[0];
    let (y0, y1, ty) = cells[1];
    let (z0, z1, tz) = cells[2];
    let nx = n[0];
    let sxy = nx * n[1];
    let at = |x: usize, y: usize, z: usize| data[x + nx * y + sxy * z];
    let v000 = at(x0, y0, z0);
    let v100 = at(x1, y0, z0);
    let v010 = at(x0, y1, z0);
    let v110 = at(x1, y1, z0);
    let v001 = at(x0, y0, z1);
    let v101 = at(x1, y0, z1);
    let v011 = at(x0, y1, z1);
    let v111 = at(x1, y1, z1);

    let c00 = f64::lerp(v000, v100, tx);
    let c10 = f64::lerp(v010, v110, tx);
    let c01 = f64::lerp(v001, v101, tx);
    let c11 = f64::lerp(v011, v111, tx);
    let c0 = f64::lerp(c00, c10, ty);
    let c1 = f64::lerp(c01, c11, ty);
    let value = f64::lerp(c0, c1, tz);

    let mut g = [0.0; 3];
    if live[0] {
        let d00 = v100 - v000;
        let d10 = v110 - v010;
        let d01 = v101 - v001;
        let d11 = v111 - v011;
        g[0] = f64::lerp(f64::lerp(d00, d10, ty), f64::lerp(d01, d11, ty), tz);
    }
    if live[1] {
        g[1] = f64::lerp(c10 - c00, c11 - c01, tz);
    }
    if live[2] {
        g[2] = c1 - c0;
    }
    (value, g)
}

/// Values that can be read at continuous voxel coordinates.
pub trait Trilinear {
    type Value;

    /// Trilinear interpolation with clamp-to-edge; exact at integer coordinates.
    fn sample_trilinear(&self, p: [f64; 3]) -> Self::Value;
}

impl Trilinear for ScalarVolume {
    type Value = f64;

    fn sample_trilinear(&self, p: [f64; 3]) -> f64 {
        trilinear(&self.data, self.header.dims, p)
    }
}

impl Trilinear for DisplacementField {
    type Value = [f64; 3];

    fn sample_trilinear(&self, p: [f64; 3]) -> [f64; 3] {
        trilinear(&self.data, self.header.dims, p)
    }
}

impl Trilinear for VelocityField {
    type Value = [f64; 3];

    fn sample_trilinear(&self, p: [f64; 3]) -> [f64; 3] {
        trilinear(&self.data, self.header.dims, p)
    }
}

pub fn sample_trilinear<V: Trilinear>(v: &V, p: [f64; 3]) -> V::Value {
    v.sample_trilinear(p)
}

#[inline(always)]
pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline(always)]
fn voxel_point(x: usize, y: usize, z: usize, u: [f64; 3]) -> [f64; 3] {
    [x as f64 + u[0], y as f64 + u[1], z as f64 + u[2]]
}

/// Fills `out[i] = f(x, y, z, i)` slice by slice.
pub(crate) fn fill_voxels<T, F>(dims: Dims, out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, usize, usize, usize) -> T + Sync + Send,
{
    let slice = dims.slice_len();
    let nx = dims.nx();
    par::for_each_chunk_mut(out, slice, |z, chunk| {
        for (j, o) in chunk.iter_mut().enumerate() {
            let x = j % nx;
            let y = j / nx;
            *o = f(x, y, z, z * slice + j);
        }
    });
}

pub(crate) fn compose_raw(
    dims: Dims,
    outer: &[[f64; 3]],
    outer_dims: Dims,
    inner: &[[f64; 3]],
) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; dims.len()];
    fill_voxels(dims, &mut out, |x, y, z, i| {
        let ui = inner[i];
        add3(ui, trilinear(outer, outer_dims, voxel_point(x, y, z, ui)))
    });
    out
}

/// `(outer ∘ inner)(x) = outer(inner(x))`; in displacement form
/// `u(x) = u_inner(x) + u_outer(x + u_inner(x))`.
pub fn compose(outer: &DisplacementField, inner: &DisplacementField) -> Result<DisplacementField> {
    outer.header.same_grid(&inner.header)?;
    let dims = inner.dims();
    Ok(DisplacementField {
        header: inner.header.clone(),
        data: compose_raw(dims, &outer.data, dims, &inner.data),
        datatype: inner.datatype,
    })
}

/// Backward warping: `out(x) = moving(x + u(x))`, trilinear.
pub fn warp_image(moving: &ScalarVolume, phi: &DisplacementField) -> ScalarVolume {
    let dims = phi.dims();
    let md = moving.dims();
    let mut data = vec![0.0; dims.len()];
    fill_voxels(dims, &mut data, |x, y, z, i| {
        trilinear(&moving.data, md, voxel_point(x, y, z, phi.data[i]))
    });
    ScalarVolume {
        header: phi_output_header(phi, &moving.header),
        data,
        datatype: moving.datatype,
    }
}

fn phi_output_header(phi: &DisplacementField, source: &AffineHeader) -> AffineHeader {
    let mut h = phi.header.clone();
    h.scl_slope = source.scl_slope;
    h.scl_inter = source.scl_inter;
    h
}

#[inline(always)]
pub(crate) fn nearest_index(p: f64, n: usize) -> usize {
    let r = (p + 0.5).floor();
    if r <= 0.0 {
        0
    } else {
        (r as usize).min(n - 1)
    }
}

/// Nearest-neighbour backward warping of a label map; ties round up.
pub fn warp_labels(moving: &LabelVolume, phi: &DisplacementField) -> LabelVolume {
    let dims = phi.dims();
    let md = moving.dims();
    let mut data = vec![0u32; dims.len()];
    fill_voxels(dims, &mut data, |x, y, z, i| {
        let p = voxel_point(x, y, z, phi.data[i]);
        let xi = nearest_index(p[0], md.nx());
        let yi = nearest_index(p[1], md.ny());
        let zi = nearest_index(p[2], md.nz());
        moving.data[md.index(xi, yi, zi)]
    });
    let mut header = phi.header.clone();
    header.scl_slope = 1.0;
    header.scl_inter = 0.0;
    LabelVolume {
        header,
        data,
        datatype: moving.datatype,
    }
}

pub(crate) fn exp_raw(dims: Dims, v: &[[f64; 3]], squarings: u32) -> Vec<[f64; 3]> {
    let scale = 0.5f64.powi(squarings as i32);
    let mut u: Vec<[f64; 3]> = v
        .iter()
        .map(|w| [w[0] * scale, w[1] * scale, w[2] * scale])
        .collect();
    for _ in 0..squarings {
        u = compose_raw(dims, &u, dims, &u);
    }
    u
}

/// Scaling and squaring: `u0 = v / 2^K`, then `K` self-compositions.
pub fn exp_svf(v: &VelocityField, squarings: u32) -> Result<DisplacementField> {
    if v.data.iter().any(|w| w.iter().any(|c| !c.is_finite())) {
        return Err(Error::NonFiniteVelocity);
    }
    let data = exp_raw(v.dims(), &v.data, squarings);
    Ok(DisplacementField {
        header: v.header.clone(),
        data,
        datatype: crate::volume::DataType::Float32,
    })
}

/// Inverse-consistency residual of a forward/backward field pair.
#[derive(Debug, Clone)]
pub struct IcResidual {
    /// Mean Euclidean norm of the residual, voxels.
    pub mae: f64,
    /// Mean absolute residual per component, voxels.
    pub mae_componentwise: f64,
    pub evaluated: usize,
    pub excluded: usize,
    /// Displacement of `phi_ab ∘ phi_ba`; zero at excluded voxels.
    pub residual: DisplacementField,
}

/// `|phi_ab ∘ phi_ba - Id|` averaged over voxels whose composed lookup stays
/// in the grid (and inside `mask` when given).
pub fn ic_residual(
    phi_ab: &DisplacementField,
    phi_ba: &DisplacementField,
    mask: Option<&LabelVolume>,
) -> Result<IcResidual> {
    phi_ab.header.same_grid(&phi_ba.header)?;
    if let Some(m) = mask {
        phi_ab.header.same_grid(&m.header)?;
    }
    let dims = phi_ab.dims();
    let slice = dims.slice_len();
    let nx = dims.nx();

    let per_slice = par::map_range(dims.nz(), |z| {
        let mut out = vec![[0.0; 3]; slice];
        let (mut sn, mut sc, mut cnt) = (0.0, 0.0, 0usize);
        for (j, o) in out.iter_mut().enumerate() {
            let i = z * slice + j;
            let inner = phi_ba.data[i];
            let q = voxel_point(j % nx, j / nx, z, inner);
            if !dims.contains_point(q) || mask.is_some_and(|m| m.data[i] == 0) {
                continue;
            }
            let r = add3(inner, trilinear(&phi_ab.data, dims, q));
            sn += crate::volume::norm3(r);
            sc += r[0].abs() + r[1].abs() + r[2].abs();
            cnt += 1;
            *o = r;
        }
        (out, sn, sc, cnt)
    });

    let mut data = Vec::with_capacity(dims.len());
    let (mut norm_sum, mut comp_sum, mut evaluated) = (0.0, 0.0, 0usize);
    for (out, sn, sc, cnt) in per_slice {
        data.extend(out);
        norm_sum += sn;
        comp_sum += sc;
        evaluated += cnt;
    }
    if evaluated == 0 {
        return Err(Error::EmptyEvaluationSet);
    }
    Ok(IcResidual {
        mae: norm_sum / evaluated as f64,
        mae_componentwise: comp_sum / (3 * evaluated) as f64,
        evaluated,
        excluded: dims.len() - evaluated,
        residual: DisplacementField {
            header: phi_ab.header.clone(),
            data,
            datatype: phi_ab.datatype,
        },
    })
}
