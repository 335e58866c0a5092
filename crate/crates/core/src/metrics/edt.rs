//! Exact squared Euclidean distance transform (lower envelope of parabolas,
//! one separable pass per axis) with anisotropic voxel spacing.

use crate::par;
use crate::volume::Dims;

/// One-dimensional transform of `f` under weight `w2` (squared spacing).
/// `v` and `z` are scratch buffers of length `n` and `n + 1`.
fn envelope_1d(f: &[f64], w2: f64, out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        let fq = f[q];
        if fq == f64::INFINITY {
            continue;
        }
        let qf = q as f64;
        loop {
            if k < 0 {
                break;
            }
            let vk = v[k as usize];
            let vkf = vk as f64;
            let s = ((fq + w2 * qf * qf) - (f[vk] + w2 * vkf * vkf)) / (2.0 * w2 * (qf - vkf));
            if s <= z[k as usize] {
                k -= 1;
            } else {
                k += 1;
                v[k as usize] = q;
                z[k as usize] = s;
                z[k as usize + 1] = f64::INFINITY;
                break;
            }
        }
        if k < 0 {
            k = 0;
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
        }
    }
    if k < 0 {
        out.fill(f64::INFINITY);
        return;
    }
    let mut j = 0usize;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while z[j + 1] < qf {
            j += 1;
        }
        let d = qf - v[j] as f64;
        *o = w2 * d * d + f[v[j]];
    }
}

/// Squared distance (mm²) from every voxel centre to the nearest feature
/// voxel centre; `INFINITY` everywhere when there are no features.
pub fn squared_edt(features: &[bool], dims: Dims, spacing: [f64; 3]) -> Vec<f64> {
    let [nx, ny, nz] = dims.0;
    let slice = nx * ny;
    let mut grid: Vec<f64> = features
        .iter()
        .map(|&f| if f { 0.0 } else { f64::INFINITY })
        .collect();
    let w = spacing.map(|s| s * s);

    // x and y passes stay within a z-slice.
    par::for_each_chunk_mut(&mut grid, slice, |_, plane| {
        let len = nx.max(ny);
        let mut v = vec![0usize; len];
        let mut zb = vec![0.0f64; len + 1];
        let mut line = vec![0.0f64; len];
        let mut out = vec![0.0f64; len];
        for y in 0..ny {
            let row = &mut plane[y * nx..(y + 1) * nx];
            line[..nx].copy_from_slice(row);
            envelope_1d(&line[..nx], w[0], &mut out[..nx], &mut v, &mut zb);
            row.copy_from_slice(&out[..nx]);
        }
        if ny > 1 {
            for x in 0..nx {
                for y in 0..ny {
                    line[y] = plane[x + y * nx];
                }
                if line[..ny].iter().all(|d| *d == f64::INFINITY) {
                    continue;
                }
                envelope_1d(&line[..ny], w[1], &mut out[..ny], &mut v, &mut zb);
                for y in 0..ny {
                    plane[x + y * nx] = out[y];
                }
            }
        }
    });

    if nz > 1 {
        let src = &grid;
        let columns = par::map_range(ny, |y| {
            let mut v = vec![0usize; nz];
            let mut zb = vec![0.0f64; nz + 1];
            let mut line = vec![0.0f64; nz];
            let mut res = vec![0.0f64; nx * nz];
            for x in 0..nx {
                for z in 0..nz {
                    line[z] = src[x + y * nx + z * slice];
                }
                envelope_1d(&line, w[2], &mut res[x * nz..(x + 1) * nz], &mut v, &mut zb);
            }
            res
        });
        for (y, res) in columns.into_iter().enumerate() {
            for x in 0..nx {
                for z in 0..nz {
                    grid[x + y * nx + z * slice] = res[x * nz + z];
                }
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let dims = Dims::new(9, 7, 6);
        let spacing = [0.8, 1.3, 2.1];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let feats: Vec<bool> = (0..dims.len()).map(|_| rng.random_bool(0.05)).collect();
        let pts: Vec<[usize; 3]> = (0..dims.len()).filter(|&i| feats[i]).map(|i| dims.coords(i)).collect();
        assert!(!pts.is_empty());
        let d = squared_edt(&feats, dims, spacing);
        for (i, di) in d.iter().enumerate() {
            let c = dims.coords(i);
            let best = pts
                .iter()
                .map(|p| {
                    (0..3)
                        .map(|a| {
                            let t = (c[a] as f64 - p[a] as f64) * spacing[a];
                            t * t
                        })
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            assert!((di - best).abs() <= 1e-9 * best.max(1.0), "{c:?}: {di} vs {best}");
        }
    }

    #[test]
    fn no_features_is_infinite() {
        let dims = Dims::cube(3);
        assert!(squared_edt(&[false; 27], dims, [1.0; 3]).iter().all(|d| d.is_infinite()));
    }
}
