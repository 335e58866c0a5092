//! Synthetic phantoms, displacement fields and registration pairs with
//! analytic ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{gaussian_smooth, gaussian_smooth_vec};
use crate::par;
use crate::volio::{Landmark, LandmarkSet};
use crate::volume::{norm3, AffineHeader, Dims, DisplacementField, LabelVolume, ScalarVolume, VelocityField};
use crate::warp::{exp_svf, sample_trilinear, warp_image, warp_labels, DEFAULT_SQUARINGS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: [f64; 3],
    pub semi_axes: [f64; 3],
}

impl Ellipsoid {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3)
            .map(|a| {
                let t = (p[a] - self.center[a]) / self.semi_axes[a];
                t * t
            })
            .sum::<f64>()
            <= 1.0
    }
}

/// Concentric ellipsoidal shells; shell `k` (0 = outermost) carries label
/// `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub dims: Dims,
    pub label_count: usize,
    pub seed: u64,
    pub noise_sigma: f64,
    pub shells: Vec<Ellipsoid>,
}

impl PhantomSpec {
    /// Shells centred in the grid, the outermost spanning about 80% of each
    /// axis, inner shells shrinking linearly.
    pub fn nested(dims: Dims, label_count: usize, seed: u64, noise_sigma: f64) -> Self {
        let center = dims.0.map(|n| (n as f64 - 1.0) / 2.0);
        let frac = [0.40, 0.36, 0.33];
        let outer: [f64; 3] = [0, 1, 2].map(|a| frac[a] * dims.0[a] as f64);
        let k = label_count.max(1) as f64;
        let shells = (0..label_count)
            .map(|s| Ellipsoid {
                center,
                semi_axes: outer.map(|o| o * (k - s as f64) / k),
            })
            .collect();
        PhantomSpec {
            dims,
            label_count,
            seed,
            noise_sigma,
            shells,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::SpecInvalid(m));
        if self.label_count < 2 {
            return bad(format!("label_count must be >= 2, got {}", self.label_count));
        }
        if self.shells.len() != self.label_count {
            return bad(format!("{} shells for {} labels", self.shells.len(), self.label_count));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be finite and >= 0, got {}", self.noise_sigma));
        }
        let outer = &self.shells[0];
        for a in 0..3 {
            let n = self.dims.0[a] as f64;
            if outer.center[a] - outer.semi_axes[a] < 0.0 || outer.center[a] + outer.semi_axes[a] > n - 1.0 {
                return bad(format!("outer shell leaves the grid along axis {a}"));
            }
        }
        for (i, w) in self.shells.windows(2).enumerate() {
            if w[0].center != w[1].center || (0..3).any(|a| w[1].semi_axes[a] >= w[0].semi_axes[a]) {
                return bad(format!("shell {} is not strictly inside shell {i}", i + 1));
            }
        }
        if self.shells.iter().flat_map(|s| s.semi_axes).any(|r| r.is_nan() || r < 1.0) {
            return bad("semi-axes must be at least one voxel".into());
        }
        Ok(())
    }

    /// Label of voxel `p`: innermost shell containing it, 0 outside.
    pub fn label_at(&self, p: [usize; 3]) -> u32 {
        let q = p.map(|c| c as f64);
        self.shells
            .iter()
            .rposition(|s| s.contains(q))
            .map_or(0, |k| k as u32 + 1)
    }
}

/// Image, labels and landmarks of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub image: ScalarVolume,
    pub labels: LabelVolume,
    pub landmarks: LandmarkSet,
}

fn normal_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Piecewise-constant intensities `label / K` plus smoothed Gaussian noise;
/// six landmarks per shell at the ends of its axes.
pub fn make_phantom(spec: &PhantomSpec) -> Result<Phantom> {
    spec.validate()?;
    let header = AffineHeader::isotropic(spec.dims);
    let labels = LabelVolume::from_fn(header.clone(), |p| spec.label_at(p))?;
    let k = spec.label_count as f64;
    let noise = if spec.noise_sigma > 0.0 {
        let raw = normal_noise(spec.dims.len(), spec.seed);
        gaussian_smooth(&raw, spec.dims, 1.0)
            .into_iter()
            .map(|v| v * spec.noise_sigma)
            .collect()
    } else {
        vec![0.0; spec.dims.len()]
    };
    let data = labels
        .data
        .iter()
        .zip(&noise)
        .map(|(&l, n)| l as f64 / k + n)
        .collect();
    let image = ScalarVolume::new(header, data)?;

    let mut lms = Vec::with_capacity(6 * spec.label_count);
    for (s, shell) in spec.shells.iter().enumerate() {
        for a in 0..3 {
            for (sign, tag) in [(-1.0, '-'), (1.0, '+')] {
                let mut p = shell.center;
                p[a] += sign * shell.semi_axes[a];
                let axis = ['x', 'y', 'z'][a];
                lms.push(Landmark {
                    name: format!("s{}{tag}{axis}", s + 1),
                    p,
                });
            }
        }
    }
    Ok(Phantom {
        image,
        labels,
        landmarks: LandmarkSet::new(lms)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FieldKind {
    Translation([f64; 3]),
    /// Exponential of smoothed Gaussian noise scaled to `amplitude` voxels
    /// maximum norm; `smoothness` is the smoothing sigma in voxels.
    Svf { seed: u64, amplitude: f64, smoothness: f64 },
    /// `u[axis] = -2 (x[axis] - c)` on `c <= x[axis] <= c + w`, zero elsewhere.
    FoldSlab { axis: usize, c: usize, w: usize },
}

/// Properties of a generated field that hold by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldFacts {
    /// Orientation preserved everywhere, so NDV is 0.
    pub diffeomorphic: bool,
    /// Folded volume in voxels³, when known in closed form.
    pub folded_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthField {
    pub field: DisplacementField,
    /// Generating velocity for SVF fields.
    pub velocity: Option<VelocityField>,
    pub facts: FieldFacts,
}

/// Gaussian-smoothed white noise rescaled so its largest vector has norm
/// `amplitude`. Noise is drawn on a grid padded by three sigmas per side so
/// smoothing sees no boundary.
pub fn random_velocity(header: &AffineHeader, seed: u64, amplitude: f64, smoothness: f64) -> Result<VelocityField> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) || !(smoothness >= 0.0 && smoothness.is_finite()) {
        return Err(Error::BadParams(format!(
            "amplitude and smoothness must be finite and >= 0, got {amplitude}, {smoothness}"
        )));
    }
    let dims = header.dims;
    let pad = (3.0 * smoothness).ceil() as usize;
    let big = Dims(dims.0.map(|n| n + 2 * pad));
    let raw = normal_noise(3 * big.len(), seed);
    let vecs: Vec<[f64; 3]> = raw.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    let smooth = gaussian_smooth_vec(&vecs, big, smoothness);
    let crop: Vec<[f64; 3]> = (0..dims.len())
        .map(|i| {
            let [x, y, z] = dims.coords(i);
            smooth[big.index(x + pad, y + pad, z + pad)]
        })
        .collect();
    let max = crop.iter().map(|v| norm3(*v)).fold(0.0, f64::max);
    let s = if max > 0.0 { amplitude / max } else { 0.0 };
    VelocityField::new(header.clone(), crop.into_iter().map(|v| v.map(|c| c * s)).collect())
}

pub fn make_field(kind: FieldKind, header: &AffineHeader) -> Result<SynthField> {
    let dims = header.dims;
    match kind {
        FieldKind::Translation(t) => {
            if t.iter().any(|c| !c.is_finite()) {
                return Err(Error::BadParams("translation must be finite".into()));
            }
            Ok(SynthField {
                field: DisplacementField::constant(header.clone(), t),
                velocity: None,
                facts: FieldFacts {
                    diffeomorphic: true,
                    folded_volume: Some(0.0),
                },
            })
        }
        FieldKind::Svf {
            seed,
            amplitude,
            smoothness,
        } => {
            let v = random_velocity(header, seed, amplitude, smoothness)?;
            Ok(SynthField {
                field: exp_svf(&v, DEFAULT_SQUARINGS)?,
                velocity: Some(v),
                facts: FieldFacts {
                    diffeomorphic: true,
                    folded_volume: Some(0.0),
                },
            })
        }
        FieldKind::FoldSlab { axis, c, w } => {
            if axis > 2 || w == 0 || c + w >= dims.0[axis] {
                return Err(Error::BadParams(format!(
                    "fold slab axis {axis}, c {c}, w {w} does not fit dims {:?}",
                    dims.0
                )));
            }
            let field = DisplacementField::from_fn(header.clone(), |p| {
                let mut u = [0.0; 3];
                if p[axis] >= c && p[axis] <= c + w {
                    u[axis] = -2.0 * (p[axis] as f64 - c as f64);
                }
                u
            })?;
            let cross: usize = (0..3).filter(|&a| a != axis).map(|a| dims.0[a]).product();
            Ok(SynthField {
                field,
                velocity: None,
                facts: FieldFacts {
                    diffeomorphic: false,
                    folded_volume: Some((w * cross) as f64),
                },
            })
        }
    }
}

/// A registration pair whose true fixed-to-moving map is `truth`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthPair {
    pub fixed: Phantom,
    pub moving: Phantom,
    pub truth: DisplacementField,
}

/// Deforms `fixed` by the inverse map `exp(-v)` so that `exp(v)` registers
/// the pair; moving landmarks are the fixed ones pushed through `exp(v)`.
pub fn make_pair(fixed: &Phantom, v: &VelocityField, squarings: u32) -> Result<SynthPair> {
    fixed.image.header.same_grid(&v.header)?;
    let truth = exp_svf(v, squarings)?;
    let inverse = exp_svf(&v.negated(), squarings)?;
    let image = warp_image(&fixed.image, &inverse);
    let labels = warp_labels(&fixed.labels, &inverse);
    let landmarks = LandmarkSet::new(
        fixed
            .landmarks
            .iter()
            .map(|lm| {
                let u = sample_trilinear(&truth, lm.p);
                Landmark {
                    name: lm.name.clone(),
                    p: [lm.p[0] + u[0], lm.p[1] + u[1], lm.p[2] + u[2]],
                }
            })
            .collect(),
    )?;
    Ok(SynthPair {
        fixed: fixed.clone(),
        moving: Phantom {
            image,
            labels,
            landmarks,
        },
        truth,
    })
}

/// Parameters of a replayable cohort of SVF-deformed phantom pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub cases: usize,
    pub dims: Dims,
    pub label_count: usize,
    pub seed: u64,
    pub noise_sigma: f64,
    pub amplitude: f64,
    pub smoothness: f64,
}

impl CohortSpec {
    pub fn new(cases: usize, dims: Dims, seed: u64) -> Self {
        CohortSpec {
            cases,
            dims,
            label_count: 4,
            seed,
            noise_sigma: 0.02,
            amplitude: 2.0,
            smoothness: 6.0,
        }
    }

    /// Seeds of case `i`: (phantom noise, velocity).
    pub fn case_seeds(&self, i: usize) -> (u64, u64) {
        let base = self.seed.wrapping_mul(1_000_003).wrapping_add(2 * i as u64);
        (base, base + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCase {
    pub case_id: String,
    pub phantom_seed: u64,
    pub velocity_seed: u64,
    pub velocity: VelocityField,
    pub pair: SynthPair,
}

/// Generates every case of `spec`, in parallel across cases.
pub fn make_cohort(spec: &CohortSpec) -> Result<Vec<SynthCase>> {
    let header = AffineHeader::isotropic(spec.dims);
    let cases = par::map_range(spec.cases, |i| {
        let (ps, vs) = spec.case_seeds(i);
        let phantom = make_phantom(&PhantomSpec::nested(spec.dims, spec.label_count, ps, spec.noise_sigma))?;
        let velocity = random_velocity(&header, vs, spec.amplitude, spec.smoothness)?;
        let pair = make_pair(&phantom, &velocity, DEFAULT_SQUARINGS)?;
        Ok(SynthCase {
            case_id: format!("case{i:03}"),
            phantom_seed: ps,
            velocity_seed: vs,
            velocity,
            pair,
        })
    });
    cases.into_iter().collect()
}
