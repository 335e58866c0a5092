//! Leaderboard ranking: pairwise one-sided significance tests, rank scores
//! in `[0.1, 1]` and geometric-mean aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::stats::{mann_whitney_u, wilcoxon_signed_rank, Alternative};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl Direction {
    fn alternative(self) -> Alternative {
        match self {
            Direction::HigherBetter => Alternative::Greater,
            Direction::LowerBetter => Alternative::Less,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// One value per case, same cases for every method.
    Paired,
    /// Independent samples per method, lengths may differ.
    Unpaired,
}

/// Per-method samples of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMatrix {
    pub metric_id: String,
    pub direction: Direction,
    pub pairing: Pairing,
    pub methods: Vec<String>,
    /// Case ids of the columns; informational for unpaired matrices.
    pub cases: Vec<String>,
    /// `values[method][case]`.
    pub values: Vec<Vec<f64>>,
}

impl MetricMatrix {
    pub fn new(
        metric_id: impl Into<String>,
        direction: Direction,
        pairing: Pairing,
        methods: Vec<String>,
        cases: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let metric_id = metric_id.into();
        if methods.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "metric {metric_id}: ranking needs at least 2 methods"
            )));
        }
        if values.len() != methods.len() {
            return Err(Error::LengthMismatch(methods.len(), values.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &methods {
            if !seen.insert(m.as_str()) {
                return Err(Error::DuplicateName(m.clone()));
            }
        }
        for (m, row) in methods.iter().zip(&values) {
            if row.is_empty() {
                return Err(Error::DegenerateInput(format!("metric {metric_id}: no values for {m}")));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::DegenerateInput(format!(
                    "metric {metric_id}: non-finite value for {m}"
                )));
            }
            if pairing == Pairing::Paired && row.len() != cases.len() {
                return Err(Error::InconsistentMethodSets(format!(
                    "metric {metric_id}: {m} has {} values for {} cases",
                    row.len(),
                    cases.len()
                )));
            }
        }
        Ok(MetricMatrix {
            metric_id,
            direction,
            pairing,
            methods,
            cases,
            values,
        })
    }
}

/// One-sided p-value that row `a` is better than row `b`.
fn better_p(m: &MetricMatrix, a: usize, b: usize) -> Result<f64> {
    let alt = m.direction.alternative();
    let r = match m.pairing {
        Pairing::Paired => wilcoxon_signed_rank(&m.values[a], &m.values[b], alt)?,
        Pairing::Unpaired => mann_whitney_u(&m.values[a], &m.values[b], alt)?,
    };
    Ok(r.p_one_sided)
}

/// `p[a][b]`: one-sided p-value that method `a` beats method `b`; `None` on
/// the diagonal.
pub fn pairwise_pvalues(m: &MetricMatrix) -> Result<Vec<Vec<Option<f64>>>> {
    let k = m.methods.len();
    let cells = par::map_range(k * k, |c| {
        let (a, b) = (c / k, c % k);
        if a == b {
            Ok(None)
        } else {
            better_p(m, a, b).map(Some)
        }
    });
    let cells: Vec<Option<f64>> = cells.into_iter().collect::<Result<_>>()?;
    Ok(cells.chunks(k).map(|r| r.to_vec()).collect())
}

/// Number of opponents each method beats at level `alpha`.
pub fn pairwise_wins(m: &MetricMatrix, alpha: f64) -> Result<BTreeMap<String, usize>> {
    let p = pairwise_pvalues(m)?;
    Ok(m.methods
        .iter()
        .zip(&p)
        .map(|(id, row)| (id.clone(), row.iter().flatten().filter(|&&v| v < alpha).count()))
        .collect())
}

/// Affine map from win counts to scores: `floor` for no wins, `ceil` for
/// beating every opponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreMapping {
    pub floor: f64,
    pub ceil: f64,
}

impl Default for ScoreMapping {
    fn default() -> Self {
        ScoreMapping { floor: 0.1, ceil: 1.0 }
    }
}

impl ScoreMapping {
    pub fn score(&self, wins: usize, method_count: usize) -> f64 {
        if method_count < 2 {
            return self.floor;
        }
        self.floor + (self.ceil - self.floor) * wins as f64 / (method_count - 1) as f64
    }
}

/// `0.1 + 0.9 * wins / (M - 1)`.
pub fn wins_to_rank_scores(wins: &BTreeMap<String, usize>, method_count: usize) -> BTreeMap<String, f64> {
    let map = ScoreMapping::default();
    wins.iter()
        .map(|(m, &w)| (m.clone(), map.score(w, method_count)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub method: String,
    /// Wins per metric; empty when built from scores alone.
    pub wins: BTreeMap<String, usize>,
    /// Rank score per metric, including metrics not pooled into ACC.
    pub rank_scores: BTreeMap<String, f64>,
    pub acc_score: f64,
    pub final_rank: usize,
}

/// Leaderboard ordered by final rank, ties listed by method id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub acc_metrics: Vec<String>,
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn get(&self, method: &str) -> Option<&RankEntry> {
        self.entries.iter().find(|e| e.method == method)
    }
}

/// Exact when all values agree.
fn geometric_mean(values: &[f64]) -> f64 {
    if values.iter().all(|v| *v == values[0]) {
        return values[0];
    }
    values.iter().product::<f64>().powf(1.0 / values.len() as f64)
}

/// Geometric mean of the scores of `metrics` per method, with competition
/// ranking on the result.
pub fn aggregate(
    rank_scores: &BTreeMap<String, BTreeMap<String, f64>>,
    metrics: &[String],
) -> Result<RankTable> {
    if metrics.is_empty() {
        return Err(Error::InconsistentMethodSets("no metrics to aggregate".into()));
    }
    let reference = rank_scores
        .get(&metrics[0])
        .ok_or_else(|| Error::InconsistentMethodSets(format!("no scores for metric {}", metrics[0])))?;
    for (id, scores) in rank_scores {
        if scores.len() != reference.len() || !scores.keys().all(|k| reference.contains_key(k)) {
            return Err(Error::InconsistentMethodSets(format!(
                "metric {id} ranks a different set of methods than {}",
                metrics[0]
            )));
        }
    }
    for m in metrics {
        if !rank_scores.contains_key(m) {
            return Err(Error::InconsistentMethodSets(format!("no scores for metric {m}")));
        }
    }
    let mut entries: Vec<RankEntry> = reference
        .keys()
        .map(|method| {
            let scores: Vec<f64> = metrics.iter().map(|m| rank_scores[m][method]).collect();
            RankEntry {
                method: method.clone(),
                wins: BTreeMap::new(),
                rank_scores: rank_scores
                    .iter()
                    .map(|(m, s)| (m.clone(), s[method]))
                    .collect(),
                acc_score: geometric_mean(&scores),
                final_rank: 0,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.acc_score
            .total_cmp(&a.acc_score)
            .then_with(|| a.method.cmp(&b.method))
    });
    for i in 0..entries.len() {
        entries[i].final_rank = if i > 0 && entries[i].acc_score == entries[i - 1].acc_score {
            entries[i - 1].final_rank
        } else {
            i + 1
        };
    }
    Ok(RankTable {
        acc_metrics: metrics.to_vec(),
        entries,
    })
}

/// Full pipeline over several metrics: wins, scores, and ACC over
/// `acc_metrics` (other matrices are scored but not pooled).
pub fn rank(matrices: &[MetricMatrix], acc_metrics: &[String], alpha: f64) -> Result<RankTable> {
    let mut wins = BTreeMap::new();
    let mut scores = BTreeMap::new();
    for m in matrices {
        let w = pairwise_wins(m, alpha)?;
        scores.insert(m.metric_id.clone(), wins_to_rank_scores(&w, m.methods.len()));
        wins.insert(m.metric_id.clone(), w);
    }
    let mut table = aggregate(&scores, acc_metrics)?;
    for e in &mut table.entries {
        e.wins = wins.iter().map(|(m, w)| (m.clone(), w[&e.method])).collect();
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i}")).collect()
    }

    fn paired(direction: Direction, values: Vec<Vec<f64>>) -> MetricMatrix {
        let cases = (0..values[0].len()).map(|c| c.to_string()).collect();
        MetricMatrix::new("x", direction, Pairing::Paired, ids(values.len()), cases, values).unwrap()
    }

    #[test]
    fn strict_dominance_wins() {
        let base: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let rows = (0..3)
            .map(|k| base.iter().map(|v| v + (2 - k) as f64).collect())
            .collect();
        let w = pairwise_wins(&paired(Direction::HigherBetter, rows), 0.05).unwrap();
        assert_eq!(w["m0"], 2);
        assert_eq!(w["m1"], 1);
        assert_eq!(w["m2"], 0);
    }

    #[test]
    fn identical_methods_never_win() {
        let row: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let w = pairwise_wins(&paired(Direction::LowerBetter, vec![row.clone(); 3]), 0.05).unwrap();
        assert!(w.values().all(|&v| v == 0));
    }

    #[test]
    fn lower_better_two_methods() {
        let b: Vec<f64> = (0..15).map(|i| 5.0 + i as f64 * 0.3).collect();
        let a: Vec<f64> = b.iter().map(|v| v - 1.0).collect();
        let m = paired(Direction::LowerBetter, vec![a, b]);
        let p = pairwise_pvalues(&m).unwrap();
        assert_eq!(p[0][1], Some(0.5f64.powi(15)));
        let w = pairwise_wins(&m, 0.05).unwrap();
        assert_eq!((w["m0"], w["m1"]), (1, 0));
    }

    #[test]
    fn score_mapping() {
        let w: BTreeMap<String, usize> = [("a", 2), ("b", 1), ("c", 0)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let s = wins_to_rank_scores(&w, 3);
        assert_eq!((s["a"], s["b"], s["c"]), (1.0, 0.55, 0.1));
        let w4: BTreeMap<String, usize> = [("a", 3), ("b", 3), ("c", 0), ("d", 0)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let s4 = wins_to_rank_scores(&w4, 4);
        assert_eq!(s4.values().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 0.1, 0.1]);
    }

    #[test]
    fn geometric_mean_and_ties() {
        let mk = |pairs: &[(&str, f64)]| -> BTreeMap<String, f64> {
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
        };
        let mut scores = BTreeMap::new();
        scores.insert("dsc".to_string(), mk(&[("a", 0.1), ("b", 1.0), ("c", 1.0)]));
        scores.insert("hd95".to_string(), mk(&[("a", 0.9), ("b", 1.0), ("c", 1.0)]));
        let t = aggregate(&scores, &["dsc".into(), "hd95".into()]).unwrap();
        assert_eq!(t.entries[0].method, "b");
        assert_eq!(t.entries[0].final_rank, 1);
        assert_eq!(t.entries[1].method, "c");
        assert_eq!(t.entries[1].final_rank, 1);
        assert_eq!(t.entries[2].final_rank, 3);
        assert!((t.get("a").unwrap().acc_score - 0.3).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_sets_rejected() {
        let mut scores = BTreeMap::new();
        scores.insert("dsc".to_string(), BTreeMap::from([("a".to_string(), 1.0)]));
        scores.insert("tre".to_string(), BTreeMap::from([("b".to_string(), 1.0)]));
        assert!(matches!(
            aggregate(&scores, &["dsc".into(), "tre".into()]),
            Err(Error::InconsistentMethodSets(_))
        ));
    }
}
