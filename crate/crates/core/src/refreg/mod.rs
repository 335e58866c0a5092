//! Reference optimization-based registration: local-NCC similarity with a
//! diffusion regularizer, solved coarse to fine by normalized gradient
//! descent with step halving.

mod config;

pub use config::{Parameterization, RegConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{downsample, gaussian_smooth_vec, upsample_field};
use crate::metrics::lncc_with_gradient;
use crate::par;
use crate::volume::{norm3, AffineHeader, Dims, DisplacementField, ScalarVolume};
use crate::warp::{compose_raw, exp_raw, fill_voxels, trilinear, trilinear_with_gradient};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub level: usize,
    pub iteration: usize,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registration {
    pub field: DisplacementField,
    /// Accepted losses; the first entry of each level is its starting loss.
    pub trace: Vec<TracePoint>,
}

/// Mean squared forward difference of `u`, averaged over voxels, axes and
/// components (differences past the last voxel count as zero).
pub fn diffusion_energy(u: &[[f64; 3]], dims: Dims) -> f64 {
    let [nx, ny, nz] = dims.0;
    let slice = nx * ny;
    let parts = par::map_range(nz, |z| {
        let mut s = 0.0;
        for y in 0..ny {
            for x in 0..nx {
                let i = x + y * nx + z * slice;
                let a = u[i];
                let mut add = |j: usize| {
                    let b = u[j];
                    s += (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2);
                };
                if x + 1 < nx {
                    add(i + 1);
                }
                if y + 1 < ny {
                    add(i + nx);
                }
                if z + 1 < nz {
                    add(i + slice);
                }
            }
        }
        s
    });
    par::ordered_sum(&parts) / (9 * u.len()) as f64
}

fn diffusion_gradient(u: &[[f64; 3]], dims: Dims) -> Vec<[f64; 3]> {
    let [nx, ny, nz] = dims.0;
    let slice = nx * ny;
    let scale = 2.0 / (9 * u.len()) as f64;
    let mut g = vec![[0.0; 3]; u.len()];
    fill_voxels(dims, &mut g, |x, y, z, i| {
        let a = u[i];
        let mut out = [0.0; 3];
        let mut pair = |j: usize| {
            for c in 0..3 {
                out[c] += scale * (a[c] - u[j][c]);
            }
        };
        if x + 1 < nx {
            pair(i + 1);
        }
        if x > 0 {
            pair(i - 1);
        }
        if y + 1 < ny {
            pair(i + nx);
        }
        if y > 0 {
            pair(i - nx);
        }
        if z + 1 < nz {
            pair(i + slice);
        }
        if z > 0 {
            pair(i - slice);
        }
        out
    });
    g
}

fn warp_with_gradient(moving: &[f64], dims: Dims, u: &[[f64; 3]]) -> (Vec<f64>, Vec<[f64; 3]>) {
    let mut both = vec![(0.0, [0.0; 3]); dims.len()];
    fill_voxels(dims, &mut both, |x, y, z, i| {
        let d = u[i];
        trilinear_with_gradient(moving, dims, [x as f64 + d[0], y as f64 + d[1], z as f64 + d[2]])
    });
    both.into_iter().unzip()
}

fn warp_raw(moving: &[f64], dims: Dims, u: &[[f64; 3]]) -> Vec<f64> {
    let mut out = vec![0.0; dims.len()];
    fill_voxels(dims, &mut out, |x, y, z, i| {
        let d = u[i];
        trilinear(moving, dims, [x as f64 + d[0], y as f64 + d[1], z as f64 + d[2]])
    });
    out
}

/// Loss `-lncc(F, M∘(Id+u)) + λ·diffusion(u)` and its gradient with respect
/// to every displacement component.
fn objective_raw(
    fixed: &[f64],
    moving: &[f64],
    dims: Dims,
    u: &[[f64; 3]],
    lambda: f64,
    window: usize,
) -> (f64, Vec<[f64; 3]>) {
    let (warped, spatial) = warp_with_gradient(moving, dims, u);
    let (cc, d_cc) = lncc_with_gradient(fixed, &warped, dims, window);
    let mut loss = -cc;
    let mut grad: Vec<[f64; 3]> = spatial
        .iter()
        .zip(&d_cc)
        .map(|(g, &d)| [-d * g[0], -d * g[1], -d * g[2]])
        .collect();
    if lambda > 0.0 {
        loss += lambda * diffusion_energy(u, dims);
        for (g, r) in grad.iter_mut().zip(diffusion_gradient(u, dims)) {
            for c in 0..3 {
                g[c] += lambda * r[c];
            }
        }
    }
    (loss, grad)
}

/// Registration loss of displacement `u` and its analytic gradient.
pub fn objective(
    fixed: &ScalarVolume,
    moving: &ScalarVolume,
    u: &DisplacementField,
    lambda: f64,
    window: usize,
) -> Result<(f64, DisplacementField)> {
    fixed.header.same_grid(&moving.header)?;
    fixed.header.same_grid(&u.header)?;
    let (loss, grad) = objective_raw(&fixed.data, &moving.data, fixed.dims(), &u.data, lambda, window);
    Ok((
        loss,
        DisplacementField {
            header: u.header.clone(),
            data: grad,
            datatype: u.datatype,
        },
    ))
}

/// One pyramid level: `moving` is already resampled through the running field.
struct Level<'a> {
    index: usize,
    dims: Dims,
    fixed: &'a [f64],
    moving: Vec<f64>,
}

impl Level<'_> {
    fn transform(&self, p: &[[f64; 3]], param: Parameterization) -> Vec<[f64; 3]> {
        match param {
            Parameterization::Displacement => p.to_vec(),
            Parameterization::Svf { squarings } => exp_raw(self.dims, p, squarings),
        }
    }

    fn evaluate(&self, p: &[[f64; 3]], cfg: &RegConfig) -> (f64, Vec<[f64; 3]>) {
        let u = self.transform(p, cfg.parameterization);
        // In SVF mode the displacement gradient stands in for the velocity
        // gradient.
        objective_raw(self.fixed, &self.moving, self.dims, &u, cfg.lambda_diffusion, cfg.lncc_window)
    }

    fn optimize(&self, iters: usize, cfg: &RegConfig, trace: &mut Vec<TracePoint>) -> Result<Vec<[f64; 3]>> {
        let n = self.dims.len();
        let mut p = vec![[0.0; 3]; n];
        let (mut loss, mut grad) = self.evaluate(&p, cfg);
        let check = |loss: f64, iteration: usize| {
            if loss.is_finite() {
                Ok(())
            } else {
                Err(Error::DivergedLoss {
                    level: self.index,
                    iteration,
                })
            }
        };
        check(loss, 0)?;
        trace.push(TracePoint {
            level: self.index,
            iteration: 0,
            loss,
        });
        let mut step = cfg.step_size;
        for it in 1..=iters {
            let dir = gaussian_smooth_vec(&grad, self.dims, cfg.update_smoothing_sigma);
            let gmax = dir.iter().map(|g| norm3(*g)).fold(0.0, f64::max);
            if gmax == 0.0 {
                break;
            }
            let mut accepted = None;
            for _ in 0..=cfg.max_halvings {
                let s = step / gmax;
                let trial: Vec<[f64; 3]> = p
                    .iter()
                    .zip(&dir)
                    .map(|(a, d)| [a[0] - s * d[0], a[1] - s * d[1], a[2] - s * d[2]])
                    .collect();
                let (l, g) = self.evaluate(&trial, cfg);
                check(l, it)?;
                if l <= loss {
                    accepted = Some((trial, l, g));
                    break;
                }
                step *= 0.5;
            }
            let Some((trial, l, g)) = accepted else {
                break;
            };
            p = trial;
            loss = l;
            grad = g;
            trace.push(TracePoint {
                level: self.index,
                iteration: it,
                loss,
            });
            step = (step * 1.5).min(cfg.step_size);
        }
        Ok(self.transform(&p, cfg.parameterization))
    }
}

fn pyramid(data: &[f64], dims: Dims, levels: usize) -> Vec<(Vec<f64>, Dims)> {
    let mut out = vec![(data.to_vec(), dims)];
    for _ in 1..levels {
        let (d, g) = out.last().unwrap();
        out.push(downsample(d, *g));
    }
    out.reverse();
    out
}

fn run(
    fixed: &ScalarVolume,
    moving: &ScalarVolume,
    init: Option<&DisplacementField>,
    levels: &[usize],
    cfg: &RegConfig,
) -> Result<Registration> {
    cfg.validate()?;
    fixed.header.same_grid(&moving.header)?;
    let dims = fixed.dims();
    let count = levels.len();
    let fixed_pyr = pyramid(&fixed.data, dims, count);
    let moving_pyr = pyramid(&moving.data, dims, count);
    let mut running: Vec<[f64; 3]> = match init {
        Some(f) => {
            fixed.header.same_grid(&f.header)?;
            f.data.clone()
        }
        None => vec![[0.0; 3]; fixed_pyr[0].1.len()],
    };
    let mut trace = Vec::new();
    for (l, &iters) in levels.iter().enumerate() {
        let (fd, ldims) = (&fixed_pyr[l].0, fixed_pyr[l].1);
        if l > 0 {
            running = upsample_field(&running, fixed_pyr[l - 1].1, ldims);
        }
        let level = Level {
            index: l,
            dims: ldims,
            fixed: fd,
            moving: warp_raw(&moving_pyr[l].0, ldims, &running),
        };
        let inc = level.optimize(iters, cfg, &mut trace)?;
        running = compose_raw(ldims, &running, ldims, &inc);
    }
    Ok(Registration {
        field: DisplacementField::new(with_float(&fixed.header), running)?,
        trace,
    })
}

fn with_float(h: &AffineHeader) -> AffineHeader {
    let mut h = h.clone();
    h.scl_slope = 1.0;
    h.scl_inter = 0.0;
    h
}

/// Coarse-to-fine registration of `moving` onto `fixed`.
pub fn register(fixed: &ScalarVolume, moving: &ScalarVolume, cfg: &RegConfig) -> Result<Registration> {
    run(fixed, moving, None, &cfg.iters_per_level, cfg)
}

/// Refines `init` at full resolution for the last level's iteration count.
pub fn instance_optimize(
    fixed: &ScalarVolume,
    moving: &ScalarVolume,
    init: &DisplacementField,
    cfg: &RegConfig,
) -> Result<Registration> {
    cfg.validate()?;
    let iters = cfg.iters_per_level[cfg.levels - 1];
    run(fixed, moving, Some(init), &[iters], cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diffusion_gradient_matches_finite_difference() {
        let dims = Dims::new(5, 4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u: Vec<[f64; 3]> = (0..dims.len())
            .map(|_| [rng.random(), rng.random(), rng.random()])
            .collect();
        let g = diffusion_gradient(&u, dims);
        let h = 1e-6;
        for i in [0, 13, 59] {
            for c in 0..3 {
                let mut up = u.clone();
                up[i][c] += h;
                let mut um = u.clone();
                um[i][c] -= h;
                let fd = (diffusion_energy(&up, dims) - diffusion_energy(&um, dims)) / (2.0 * h);
                assert!((fd - g[i][c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(RegConfig::default().validate().is_ok());
        let cfg = RegConfig {
            iters_per_level: vec![1],
            ..RegConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let cfg = RegConfig {
            lncc_window: 4,
            ..RegConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
