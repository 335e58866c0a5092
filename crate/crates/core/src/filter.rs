//! Separable grid filters: Gaussian smoothing, truncated box sums and the
//! factor-2 resampling used by the registration pyramid.

use crate::par;
use crate::volume::Dims;
use crate::warp::{fill_voxels, trilinear};

/// Normalized Gaussian taps, truncated at 3 sigma. Empty for `sigma <= 0`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return Vec::new();
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    for w in &mut k {
        *w /= s;
    }
    k
}

/// Line geometry for a pass along `axis`: (line length, element stride,
/// number of lines, line start for line index).
fn lines(dims: Dims, axis: usize) -> (usize, usize, usize) {
    let [nx, ny, nz] = dims.0;
    match axis {
        0 => (nx, 1, ny * nz),
        1 => (ny, nx, nx * nz),
        _ => (nz, nx * ny, nx * ny),
    }
}

fn line_start(dims: Dims, axis: usize, line: usize) -> usize {
    let [nx, ny, _] = dims.0;
    match axis {
        0 => line * nx,
        1 => (line / nx) * nx * ny + line % nx,
        _ => line,
    }
}

/// Applies `f(input_line, output_line)` to every line along `axis`.
fn map_lines(
    dims: Dims,
    axis: usize,
    src: &[f64],
    f: impl Fn(&[f64], &mut [f64]) + Sync + Send,
) -> Vec<f64> {
    let (len, stride, count) = lines(dims, axis);
    let results = par::map_range(count, |l| {
        let start = line_start(dims, axis, l);
        let input: Vec<f64> = (0..len).map(|i| src[start + i * stride]).collect();
        let mut out = vec![0.0; len];
        f(&input, &mut out);
        out
    });
    let mut dst = vec![0.0; src.len()];
    for (l, out) in results.into_iter().enumerate() {
        let start = line_start(dims, axis, l);
        for (i, v) in out.into_iter().enumerate() {
            dst[start + i * stride] = v;
        }
    }
    dst
}

fn convolve_clamped(kernel: &[f64], input: &[f64], out: &mut [f64]) {
    let r = (kernel.len() / 2) as i64;
    let n = input.len() as i64;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, w) in kernel.iter().enumerate() {
            let j = (i as i64 + k as i64 - r).clamp(0, n - 1);
            acc += w * input[j as usize];
        }
        *o = acc;
    }
}

/// Gaussian smoothing with clamp-to-edge boundaries.
pub fn gaussian_smooth(data: &[f64], dims: Dims, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    if kernel.len() <= 1 {
        return data.to_vec();
    }
    let mut cur = data.to_vec();
    for axis in 0..3 {
        if dims.0[axis] > 1 {
            cur = map_lines(dims, axis, &cur, |i, o| convolve_clamped(&kernel, i, o));
        }
    }
    cur
}

pub fn gaussian_smooth_vec(data: &[[f64; 3]], dims: Dims, sigma: f64) -> Vec<[f64; 3]> {
    if sigma <= 0.0 {
        return data.to_vec();
    }
    let channels: Vec<Vec<f64>> = (0..3)
        .map(|c| {
            let ch: Vec<f64> = data.iter().map(|v| v[c]).collect();
            gaussian_smooth(&ch, dims, sigma)
        })
        .collect();
    (0..data.len())
        .map(|i| [channels[0][i], channels[1][i], channels[2][i]])
        .collect()
}

fn box_line(r: usize, input: &[f64], out: &mut [f64]) {
    let n = input.len();
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        *o = input[lo..=hi].iter().sum();
    }
}

/// Sum over the cubic window of radius `r` centred on each voxel, truncated
/// at the grid boundary.
pub fn box_sum(data: &[f64], dims: Dims, r: usize) -> Vec<f64> {
    let mut cur = data.to_vec();
    if r == 0 {
        return cur;
    }
    for axis in 0..3 {
        cur = map_lines(dims, axis, &cur, |i, o| box_line(r, i, o));
    }
    cur
}

/// Number of in-grid voxels in each truncated window.
pub fn box_count(dims: Dims, r: usize) -> Vec<f64> {
    let counts: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            let n = dims.0[a];
            (0..n)
                .map(|i| ((i + r).min(n - 1) - i.saturating_sub(r) + 1) as f64)
                .collect()
        })
        .collect();
    let mut out = vec![0.0; dims.len()];
    fill_voxels(dims, &mut out, |x, y, z, _| counts[0][x] * counts[1][y] * counts[2][z]);
    out
}

/// Smooths with sigma 1 and keeps every second voxel.
pub fn downsample(data: &[f64], dims: Dims) -> (Vec<f64>, Dims) {
    let smoothed = gaussian_smooth(data, dims, 1.0);
    let coarse = dims.halved();
    let mut out = vec![0.0; coarse.len()];
    fill_voxels(coarse, &mut out, |x, y, z, _| {
        smoothed[dims.index(2 * x, 2 * y, 2 * z)]
    });
    (out, coarse)
}

/// Resamples a coarse-level displacement onto a finer grid: fine voxel `x`
/// reads the coarse field at `x / 2` and the vector is doubled.
pub fn upsample_field(coarse: &[[f64; 3]], coarse_dims: Dims, fine: Dims) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; fine.len()];
    fill_voxels(fine, &mut out, |x, y, z, _| {
        let p = [x as f64 * 0.5, y as f64 * 0.5, z as f64 * 0.5];
        let u = trilinear(coarse, coarse_dims, p);
        [2.0 * u[0], 2.0 * u[1], 2.0 * u[2]]
    });
    out
}
