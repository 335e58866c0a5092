#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regeval::{AffineHeader, Dims, DisplacementField, LabelVolume};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Union of a few random boxes carrying labels `1..=k`.
pub fn random_blobs(dims: Dims, k: u32, seed: u64) -> LabelVolume {
    let mut r = rng(seed);
    let mut data = vec![0u32; dims.len()];
    for l in 1..=k {
        for _ in 0..2 {
            let lo: [usize; 3] = [0, 1, 2].map(|a| r.random_range(0..dims.0[a] - 1));
            let hi: [usize; 3] = [0, 1, 2].map(|a| (lo[a] + r.random_range(1..dims.0[a] / 2)).min(dims.0[a] - 1));
            for z in lo[2]..=hi[2] {
                for y in lo[1]..=hi[1] {
                    for x in lo[0]..=hi[0] {
                        data[dims.index(x, y, z)] = l;
                    }
                }
            }
        }
    }
    LabelVolume::new(AffineHeader::isotropic(dims), data).unwrap()
}

/// Smooth field from a handful of low-frequency sinusoids.
pub fn smooth_field(dims: Dims, amplitude: f64, seed: u64) -> DisplacementField {
    let mut r = rng(seed);
    let waves: Vec<([f64; 3], f64, usize, f64)> = (0..6)
        .map(|_| {
            let k = [0, 1, 2].map(|a| r.random_range(0.5..2.0) * std::f64::consts::TAU / dims.0[a] as f64);
            (k, r.random_range(0.0..6.3), r.random_range(0..3), r.random_range(-1.0..1.0))
        })
        .collect();
    DisplacementField::from_fn(AffineHeader::isotropic(dims), |p| {
        let mut u = [0.0; 3];
        for (k, ph, c, a) in &waves {
            let arg: f64 = (0..3).map(|i| k[i] * p[i] as f64).sum::<f64>() + ph;
            u[*c] += amplitude * a * arg.sin() / 2.0;
        }
        u
    })
    .unwrap()
}
