use super::ranks::doubled_ranks;
use super::{normal_cdf, Alternative, MethodChoice, TestMethod, TestResult};
use crate::error::{Error, Result};

/// Largest number of nonzero differences for which the exact null
/// distribution is used under [`MethodChoice::Auto`].
pub const EXACT_MAX_N: usize = 25;

/// Paired one-sided Wilcoxon signed-rank test of `x - y`.
///
/// Zero differences are dropped. Ties among `|d|` receive average ranks; the
/// exact branch enumerates sign patterns over those ranks (via a subset-sum
/// count), the normal branch uses the tie-corrected variance and a 0.5
/// continuity correction.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alt: Alternative) -> Result<TestResult> {
    wilcoxon_signed_rank_with(x, y, alt, MethodChoice::Auto)
}

pub fn wilcoxon_signed_rank_with(
    x: &[f64],
    y: &[f64],
    alt: Alternative,
    choice: MethodChoice,
) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if diffs.iter().any(|d| d.is_nan()) {
        return Err(Error::DegenerateInput("NaN difference".into()));
    }
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let zeros_dropped = diffs.len() - nonzero.len();
    let n = nonzero.len();
    if n == 0 {
        return Ok(TestResult {
            statistic: 0.0,
            p_one_sided: 1.0,
            n_effective: 0,
            method: TestMethod::Exact,
            zeros_dropped,
            all_zero: true,
        });
    }

    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks2, ties) = doubled_ranks(&abs);
    let w2: u64 = nonzero
        .iter()
        .zip(&ranks2)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let w_plus = w2 as f64 / 2.0;

    let exact = match choice {
        MethodChoice::Auto => n <= EXACT_MAX_N,
        MethodChoice::Exact => true,
        MethodChoice::Normal => false,
    };
    let (p, method) = if exact {
        (exact_p(&ranks2, w2, alt), TestMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
        (normal_p(w_plus, mean, var, alt), TestMethod::NormalApprox)
    };
    Ok(TestResult {
        statistic: w_plus,
        p_one_sided: p.clamp(0.0, 1.0),
        n_effective: n,
        method,
        zeros_dropped,
        all_zero: false,
    })
}

/// Every sign pattern is equally likely under H0, so the number of patterns
/// with doubled positive-rank sum `s` is the number of subsets summing to `s`.
fn exact_p(ranks2: &[u64], w2: u64, alt: Alternative) -> f64 {
    let total: u64 = ranks2.iter().sum();
    let width = total as usize + 1;
    let mut counts = vec![0.0f64; width];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        reach += r;
        for s in (r..=reach).rev() {
            counts[s] += counts[s - r];
        }
    }
    let patterns = 2f64.powi(ranks2.len() as i32);
    let w = w2 as usize;
    let tail: f64 = match alt {
        Alternative::Greater => counts[w..].iter().sum(),
        Alternative::Less => counts[..=w].iter().sum(),
    };
    tail / patterns
}

pub(crate) fn normal_p(stat: f64, mean: f64, var: f64, alt: Alternative) -> f64 {
    if var <= 0.0 {
        return 1.0;
    }
    let sd = var.sqrt();
    match alt {
        Alternative::Greater => 1.0 - normal_cdf((stat - mean - 0.5) / sd),
        Alternative::Less => normal_cdf((stat - mean + 0.5) / sd),
    }
}
