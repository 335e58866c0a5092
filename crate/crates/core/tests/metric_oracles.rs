mod common;

use proptest::prelude::*;
use rand::Rng;
use regeval::metrics::{dsc, evaluate_pair, hd95, lncc, ndv, tre, Hd95, PairInputs};
use regeval::synth::{make_field, FieldKind};
use regeval::volio::{Landmark, LandmarkSet};
use regeval::{AffineHeader, Dims, DisplacementField, LabelVolume, ScalarVolume};

fn boundary_oracle(v: &LabelVolume, label: u32) -> Vec<[usize; 3]> {
    let d = v.dims();
    let mut out = Vec::new();
    for i in 0..d.len() {
        if v.data[i] != label {
            continue;
        }
        let p = d.coords(i);
        let mut edge = false;
        for a in 0..3 {
            for s in [-1i64, 1] {
                let q = p[a] as i64 + s;
                if q < 0 || q >= d.0[a] as i64 {
                    edge = true;
                    continue;
                }
                let mut n = p;
                n[a] = q as usize;
                if v.data[d.index(n[0], n[1], n[2])] != label {
                    edge = true;
                }
            }
        }
        if edge {
            out.push(p);
        }
    }
    out
}

fn p95(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = 0.95 * (v.len() - 1) as f64;
    let lo = r.floor() as usize;
    let hi = r.ceil() as usize;
    v[lo] + (r - lo as f64) * (v[hi] - v[lo])
}

fn directed(a: &[[usize; 3]], b: &[[usize; 3]], s: [f64; 3]) -> Vec<f64> {
    a.iter()
        .map(|p| {
            b.iter()
                .map(|q| {
                    (0..3)
                        .map(|k| ((p[k] as f64 - q[k] as f64) * s[k]).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

#[test]
fn hd95_matches_all_pairs_oracle() {
    let dims = Dims::new(16, 14, 12);
    let spacing = [0.9, 1.2, 1.7];
    for seed in 0..12 {
        let a = common::random_blobs(dims, 3, seed);
        let b = common::random_blobs(dims, 3, seed + 100);
        for label in 1..=3 {
            let ba = boundary_oracle(&a, label);
            let bb = boundary_oracle(&b, label);
            let got = hd95(&a, &b, label, spacing).unwrap();
            let expect = p95(directed(&ba, &bb, spacing)).max(p95(directed(&bb, &ba, spacing)));
            match got {
                Hd95::Value(v) => assert!((v - expect).abs() <= 1e-9, "{v} vs {expect}"),
                other => panic!("unexpected {other:?}"),
            }
            assert_eq!(hd95(&b, &a, label, spacing).unwrap(), got);
        }
    }
}

#[test]
fn dsc_matches_counting_oracle() {
    let dims = Dims::cube(12);
    for seed in 0..10 {
        let a = common::random_blobs(dims, 4, seed);
        let b = common::random_blobs(dims, 4, seed + 50);
        let r = dsc(&a, &b, &[1, 2, 3, 4, 9]).unwrap();
        for l in [1u32, 2, 3, 4] {
            let na = a.data.iter().filter(|&&v| v == l).count();
            let nb = b.data.iter().filter(|&&v| v == l).count();
            let both = a.data.iter().zip(&b.data).filter(|(x, y)| **x == l && **y == l).count();
            let expect = 2.0 * both as f64 / (na + nb) as f64;
            assert_eq!(r.per_label[&l], Some(expect));
        }
        assert_eq!(r.per_label[&9], None);
        assert_eq!(r, dsc(&b, &a, &[1, 2, 3, 4, 9]).unwrap());
    }
}

#[test]
fn dsc_shifted_bar() {
    let h = AffineHeader::isotropic(Dims::new(1, 1, 6));
    let a = LabelVolume::from_fn(h.clone(), |[_, _, z]| u32::from(z < 4)).unwrap();
    let b = LabelVolume::from_fn(h, |[_, _, z]| u32::from(z >= 2)).unwrap();
    assert_eq!(dsc(&a, &b, &[1]).unwrap().mean, Some(0.5));
}

fn lncc_oracle(a: &[f64], b: &[f64], dims: Dims, window: usize) -> f64 {
    let r = (window / 2) as i64;
    let mut total = 0.0;
    for i in 0..dims.len() {
        let p = dims.coords(i);
        let mut idx = Vec::new();
        for z in p[2] as i64 - r..=p[2] as i64 + r {
            for y in p[1] as i64 - r..=p[1] as i64 + r {
                for x in p[0] as i64 - r..=p[0] as i64 + r {
                    if x >= 0 && y >= 0 && z >= 0 && (x as usize) < dims.nx() && (y as usize) < dims.ny() && (z as usize) < dims.nz() {
                        idx.push(dims.index(x as usize, y as usize, z as usize));
                    }
                }
            }
        }
        let n = idx.len() as f64;
        let ma = idx.iter().map(|&j| a[j]).sum::<f64>() / n;
        let mb = idx.iter().map(|&j| b[j]).sum::<f64>() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for &j in &idx {
            sab += (a[j] - ma) * (b[j] - mb);
            saa += (a[j] - ma).powi(2);
            sbb += (b[j] - mb).powi(2);
        }
        total += sab / ((saa + 1e-5) * (sbb + 1e-5)).sqrt();
    }
    total / dims.len() as f64
}

#[test]
fn lncc_matches_sliding_window_oracle() {
    let dims = Dims::cube(16);
    let h = AffineHeader::isotropic(dims);
    let mut r = common::rng(21);
    let a = ScalarVolume::new(h.clone(), (0..dims.len()).map(|_| r.random::<f64>()).collect()).unwrap();
    let b = ScalarVolume::new(h, (0..dims.len()).map(|_| r.random::<f64>()).collect()).unwrap();
    let got = lncc(&a, &b, 9).unwrap();
    assert!((got - lncc_oracle(&a.data, &b.data, dims, 9)).abs() < 1e-9);
}

#[test]
fn lncc_affine_invariance() {
    let dims = Dims::cube(12);
    let h = AffineHeader::isotropic(dims);
    let mut r = common::rng(5);
    let a = ScalarVolume::new(h.clone(), (0..dims.len()).map(|_| r.random::<f64>()).collect()).unwrap();
    let b = ScalarVolume::new(h, a.data.iter().map(|v| 3.0 * v + 2.0).collect()).unwrap();
    assert!((lncc(&a, &b, 9).unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn fold_slab_fraction() {
    let h = AffineHeader::isotropic(Dims::cube(64));
    let mask = LabelVolume::from_fn(h.clone(), |_| 1).unwrap();
    for (c, w) in [(10, 2), (30, 5)] {
        let f = make_field(FieldKind::FoldSlab { axis: 1, c, w }, &h).unwrap();
        let expect = f.facts.folded_volume.unwrap() / 64f64.powi(3);
        let got = ndv(&f.field, &mask).unwrap();
        assert!((got - expect).abs() / expect < 0.02, "{got} vs {expect}");
    }
}

#[test]
fn zero_field_reproduces_raw_overlap() {
    let dims = Dims::cube(16);
    let a = common::random_blobs(dims, 3, 1);
    let b = common::random_blobs(dims, 3, 2);
    let zero = DisplacementField::identity(a.header.clone());
    let r = evaluate_pair("zero", "p", PairInputs::new(&a, &b, &zero)).unwrap();
    let direct = dsc(&a, &b, &[1, 2, 3]).unwrap();
    assert_eq!(r.dsc_per_label, direct.per_label);
    assert_eq!(r.dsc_mean, direct.mean);
}

fn landmarks(points: &[[f64; 3]], names: &[String]) -> LandmarkSet {
    LandmarkSet::new(
        points
            .iter()
            .zip(names)
            .map(|(&p, n)| Landmark { name: n.clone(), p })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tre_translation_equivariant(
        pts in prop::collection::vec(prop::array::uniform3(4.0f64..12.0), 1..6),
        offs in prop::collection::vec(prop::array::uniform3(-2.0f64..2.0), 6),
        t in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let h = AffineHeader::isotropic(Dims::cube(20));
        let names: Vec<String> = (0..pts.len()).map(|i| format!("n{i}")).collect();
        let moved: Vec<[f64; 3]> = pts.iter().zip(&offs).map(|(p, o)| [p[0] + o[0], p[1] + o[1], p[2] + o[2]]).collect();
        let fixed = landmarks(&pts, &names);
        let moving = landmarks(&moved, &names);
        let base = tre(&fixed, &moving, &DisplacementField::identity(h.clone()), [1.0; 3]).unwrap();
        let shifted: Vec<[f64; 3]> = moved.iter().map(|p| [p[0] + t[0], p[1] + t[1], p[2] + t[2]]).collect();
        let got = tre(&fixed, &landmarks(&shifted, &names), &DisplacementField::constant(h, t), [1.0; 3]).unwrap();
        for (a, b) in base.iter().zip(&got) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ndv_is_nonnegative(seed in 0u64..500, amp in 0.5f64..6.0) {
        let f = common::smooth_field(Dims::cube(10), amp, seed);
        let mask = LabelVolume::from_fn(f.header.clone(), |_| 1).unwrap();
        prop_assert!(ndv(&f, &mask).unwrap() >= 0.0);
    }
}
