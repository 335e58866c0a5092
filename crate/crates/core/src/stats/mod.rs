//! Statistical primitives used by the evaluator and the leaderboard.

mod cohort;
mod pearson;
mod percentile;
mod ranks;
mod signed_rank;
mod rank_sum;

pub use cohort::{mean, mean_std, CohortStats, MeanStd};
pub use pearson::{pearson_fit, LinearFit};
pub use percentile::{dsc30, percentile, tre30};
pub use rank_sum::{mann_whitney_u, mann_whitney_u_with, EXACT_MAX_MIN_SIZE, EXACT_MAX_TOTAL};
pub use signed_rank::{wilcoxon_signed_rank, wilcoxon_signed_rank_with, EXACT_MAX_N};

use serde::{Deserialize, Serialize};

/// Direction of the one-sided alternative, stated for the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    Greater,
    Less,
}

impl Alternative {
    pub fn flip(self) -> Self {
        match self {
            Alternative::Greater => Alternative::Less,
            Alternative::Less => Alternative::Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestMethod {
    Exact,
    NormalApprox,
}

/// Which null distribution to use. `Auto` applies the size thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// W+ for the signed-rank test, U of the first sample for the rank-sum test.
    pub statistic: f64,
    pub p_one_sided: f64,
    pub n_effective: usize,
    pub method: TestMethod,
    /// Zero paired differences removed before ranking.
    pub zeros_dropped: usize,
    /// Set when every paired difference was zero; p is then 1.
    pub all_zero: bool,
}

/// Standard normal CDF.
pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}
