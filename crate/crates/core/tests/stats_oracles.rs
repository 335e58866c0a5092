mod common;

use rand::seq::SliceRandom;
use rand::Rng;
use regeval::stats::{
    mann_whitney_u_with, pearson_fit, wilcoxon_signed_rank_with, Alternative, MethodChoice,
};

/// Fraction of the `2^n` sign assignments whose W+ is at least (or at most)
/// the observed one.
fn signed_rank_enumeration(d: &[f64], alt: Alternative) -> f64 {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].abs().partial_cmp(&d[b].abs()).unwrap());
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let observed: usize = (0..n).filter(|&i| d[i] > 0.0).map(|i| rank[i]).sum();
    let hits = (0u32..1 << n)
        .filter(|mask| {
            let w: usize = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| rank[i]).sum();
            match alt {
                Alternative::Greater => w >= observed,
                Alternative::Less => w <= observed,
            }
        })
        .count();
    hits as f64 / (1u64 << n) as f64
}

/// Fraction of the `C(n+m, n)` splits of the pooled ranks whose first-sample
/// rank sum is at least (or at most) the observed one.
fn rank_sum_enumeration(x: &[f64], y: &[f64], alt: Alternative) -> f64 {
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let total = pooled.len();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| pooled[a].partial_cmp(&pooled[b]).unwrap());
    let mut rank = vec![0usize; total];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let observed: usize = rank[..x.len()].iter().sum();
    let (mut hits, mut all) = (0u64, 0u64);
    for mask in 0u32..1 << total {
        if mask.count_ones() as usize != x.len() {
            continue;
        }
        all += 1;
        let s: usize = (0..total).filter(|&i| mask >> i & 1 == 1).map(|i| rank[i]).sum();
        let hit = match alt {
            Alternative::Greater => s >= observed,
            Alternative::Less => s <= observed,
        };
        hits += u64::from(hit);
    }
    hits as f64 / all as f64
}

fn distinct(r: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=n).map(|i| i as f64 + r.random_range(0.0..0.5)).collect();
    v.shuffle(r);
    v
}

#[test]
fn signed_rank_exact_matches_enumeration() {
    let mut r = common::rng(1);
    for _ in 0..200 {
        let n = r.random_range(1..=12);
        let d: Vec<f64> = distinct(&mut r, n)
            .into_iter()
            .map(|v| if r.random_bool(0.5) { v } else { -v })
            .collect();
        let alt = if r.random_bool(0.5) { Alternative::Greater } else { Alternative::Less };
        let zeros = vec![0.0; n];
        let got = wilcoxon_signed_rank_with(&d, &zeros, alt, MethodChoice::Exact).unwrap();
        assert!((got.p_one_sided - signed_rank_enumeration(&d, alt)).abs() < 1e-12);
    }
}

#[test]
fn rank_sum_exact_matches_enumeration() {
    let mut r = common::rng(2);
    for _ in 0..200 {
        let n = r.random_range(1..=8);
        let m = r.random_range(1..=8);
        let pooled = distinct(&mut r, n + m);
        let (x, y) = pooled.split_at(n);
        let alt = if r.random_bool(0.5) { Alternative::Greater } else { Alternative::Less };
        let got = mann_whitney_u_with(x, y, alt, MethodChoice::Exact).unwrap();
        assert!((got.p_one_sided - rank_sum_enumeration(x, y, alt)).abs() < 1e-12);
    }
}

#[test]
fn normal_branch_close_to_exact() {
    let mut r = common::rng(3);
    for n in 20..=25 {
        for _ in 0..20 {
            let shift = r.random_range(-0.5..0.5);
            let d: Vec<f64> = distinct(&mut r, n)
                .into_iter()
                .map(|v| if r.random_bool(0.5 + shift / 2.0) { v } else { -v })
                .collect();
            let zeros = vec![0.0; n];
            let e = wilcoxon_signed_rank_with(&d, &zeros, Alternative::Greater, MethodChoice::Exact).unwrap();
            let a = wilcoxon_signed_rank_with(&d, &zeros, Alternative::Greater, MethodChoice::Normal).unwrap();
            assert!((e.p_one_sided - a.p_one_sided).abs() < 0.01);
        }
    }
}

#[test]
fn pearson_on_exact_line() {
    let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
    let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.5 * v).collect();
    let fit = pearson_fit(&x, &y).unwrap();
    assert!((fit.r + 1.0).abs() < 1e-12);
    assert!((fit.slope + 2.5).abs() < 1e-12);
    assert!((fit.intercept - 3.0).abs() < 1e-12);
}
