use super::ranks::{doubled_ranks, subset_sum_counts};
use super::signed_rank::normal_p;
use super::{Alternative, MethodChoice, TestMethod, TestResult};
use crate::error::{Error, Result};

/// Exact branch applies when the smaller sample has at most this many values...
pub const EXACT_MAX_MIN_SIZE: usize = 10;
/// ...and the pooled sample is no larger than this (bounds the subset-sum table).
pub const EXACT_MAX_TOTAL: usize = 1000;

/// Unpaired one-sided Wilcoxon rank-sum (Mann-Whitney U) test.
///
/// `statistic` is `U_x = R_x - n(n+1)/2`. Ties receive average ranks. The
/// exact branch counts all `C(n+m, n)` assignments of the pooled ranks; the
/// normal branch uses the tie-corrected variance with continuity correction.
pub fn mann_whitney_u(x: &[f64], y: &[f64], alt: Alternative) -> Result<TestResult> {
    mann_whitney_u_with(x, y, alt, MethodChoice::Auto)
}

pub fn mann_whitney_u_with(
    x: &[f64],
    y: &[f64],
    alt: Alternative,
    choice: MethodChoice,
) -> Result<TestResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    if pooled.iter().any(|v| v.is_nan()) {
        return Err(Error::DegenerateInput("NaN in sample".into()));
    }
    let (n, m) = (x.len(), y.len());
    let total_n = n + m;
    let (ranks2, ties) = doubled_ranks(&pooled);
    let rx2: u64 = ranks2[..n].iter().sum();
    let u = rx2 as f64 / 2.0 - (n * (n + 1)) as f64 / 2.0;

    let exact = match choice {
        MethodChoice::Auto => n.min(m) <= EXACT_MAX_MIN_SIZE && total_n <= EXACT_MAX_TOTAL,
        MethodChoice::Exact => true,
        MethodChoice::Normal => false,
    };
    let (p, method) = if exact {
        (exact_p(&ranks2, n, rx2, alt), TestMethod::Exact)
    } else {
        let nf = n as f64;
        let mf = m as f64;
        let big = total_n as f64;
        let mean = nf * mf / 2.0;
        let var = nf * mf / 12.0 * ((big + 1.0) - ties / (big * (big - 1.0)));
        (normal_p(u, mean, var, alt), TestMethod::NormalApprox)
    };
    Ok(TestResult {
        statistic: u,
        p_one_sided: p.clamp(0.0, 1.0),
        n_effective: total_n,
        method,
        zeros_dropped: 0,
        all_zero: false,
    })
}

fn exact_p(ranks2: &[u64], n: usize, rx2: u64, alt: Alternative) -> f64 {
    let m = ranks2.len() - n;
    let total: u64 = ranks2.iter().sum();
    // Count subsets of the smaller size; R_x = total - R_y when y is smaller.
    let (k, obs, flip) = if n <= m {
        (n, rx2, false)
    } else {
        (m, total - rx2, true)
    };
    let counts = subset_sum_counts(ranks2, k);
    let all: f64 = counts.iter().sum();
    let obs = obs as usize;
    // Larger R_x corresponds to smaller R_y.
    let upper = matches!(alt, Alternative::Greater) != flip;
    let tail: f64 = if upper {
        counts[obs..].iter().sum()
    } else {
        counts[..=obs].iter().sum()
    };
    tail / all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_samples() {
        let r = mann_whitney_u(&[10.0, 11.0, 12.0], &[1.0, 2.0, 3.0], Alternative::Greater).unwrap();
        assert_eq!(r.statistic, 9.0);
        assert_eq!(r.method, TestMethod::Exact);
        assert!((r.p_one_sided - 0.05).abs() < 1e-15);
        let r = mann_whitney_u(&[10.0, 11.0, 12.0], &[1.0, 2.0, 3.0], Alternative::Less).unwrap();
        assert!((r.p_one_sided - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_multisets_do_not_reject() {
        let x = [1.0, 2.0, 2.0, 5.0];
        let y = [2.0, 5.0, 1.0, 2.0];
        for alt in [Alternative::Greater, Alternative::Less] {
            assert!(mann_whitney_u(&x, &y, alt).unwrap().p_one_sided >= 0.5);
            assert!(
                mann_whitney_u_with(&x, &y, alt, MethodChoice::Normal)
                    .unwrap()
                    .p_one_sided
                    >= 0.5
            );
        }
    }

    #[test]
    fn larger_first_sample_uses_flipped_count() {
        let x = [5.0, 6.0, 7.0, 8.0];
        let y = [1.0, 9.0];
        let a = mann_whitney_u(&x, &y, Alternative::Greater).unwrap();
        let b = mann_whitney_u(&y, &x, Alternative::Less).unwrap();
        assert!((a.p_one_sided - b.p_one_sided).abs() < 1e-15);
    }

    #[test]
    fn empty_sample() {
        assert!(matches!(
            mann_whitney_u(&[], &[1.0], Alternative::Greater),
            Err(Error::EmptyInput)
        ));
    }
}
