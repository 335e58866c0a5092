use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use regeval::metrics::PairReport;
use regeval::ranking::{pairwise_pvalues, rank, Direction, MetricMatrix, Pairing, RankEntry, RankTable};
use regeval::stats::{percentile, CohortStats, MeanStd};
use serde::Serialize;

use crate::args::{Cli, RankArgs};
use crate::io::{out_dir, write_json, write_text};
use crate::{CliError, CliResult};

/// Metrics that may be pooled into ACC.
pub const ACC_METRICS: [&str; 3] = ["dsc", "hd95", "tre"];
const KNOWN: [&str; 6] = ["dsc", "hd95", "tre", "ndv", "dsc30", "tre30"];

/// Reads every `method__pair.json` report in `dir`, sorted by file name.
pub fn load_reports(dir: &Path) -> CliResult<Vec<PairReport>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.contains("__"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Leaderboard {
    pub alpha: f64,
    pub metrics: Vec<String>,
    pub table: RankTable,
    /// `pvalues[metric][a][b]`: one-sided p that method `a` beats `b`, in
    /// the order of `methods`.
    pub methods: Vec<String>,
    pub pvalues: BTreeMap<String, Vec<Vec<Option<f64>>>>,
    #[serde(skip)]
    pub cohort: BTreeMap<String, CohortStats>,
}

type ByMethod<'a> = BTreeMap<String, BTreeMap<String, &'a PairReport>>;

fn group(reports: &[PairReport]) -> ByMethod<'_> {
    let mut by: ByMethod = BTreeMap::new();
    for r in reports {
        by.entry(r.method_id.clone()).or_default().insert(r.pair_id.clone(), r);
    }
    by
}

fn per_case(metric: &str, r: &PairReport) -> Option<f64> {
    match metric {
        "dsc" => r.dsc_mean,
        "hd95" => r.hd95_mean,
        "tre" => r.tre_mean,
        "ndv" => Some(r.ndv),
        _ => None,
    }
}

fn direction(metric: &str) -> Direction {
    if metric.starts_with("dsc") {
        Direction::HigherBetter
    } else {
        Direction::LowerBetter
    }
}

/// Worst 30% of a method's pooled per-structure DSC or per-landmark TRE.
fn worst_tail(metric: &str, cases: &BTreeMap<String, &PairReport>) -> CliResult<Vec<f64>> {
    let pooled: Vec<f64> = if metric == "dsc30" {
        cases.values().flat_map(|r| r.dsc_per_label.values().filter_map(|v| *v)).collect()
    } else {
        cases.values().flat_map(|r| r.tre_per_landmark.iter().copied()).collect()
    };
    if pooled.is_empty() {
        return Ok(Vec::new());
    }
    Ok(if metric == "dsc30" {
        let cut = percentile(&pooled, 30.0)?;
        pooled.into_iter().filter(|v| *v <= cut).collect()
    } else {
        let cut = percentile(&pooled, 70.0)?;
        pooled.into_iter().filter(|v| *v >= cut).collect()
    })
}

/// Builds the matrix for `metric`, or `None` when no report carries it.
fn matrix(metric: &str, by: &ByMethod<'_>) -> CliResult<Option<MetricMatrix>> {
    let methods: Vec<String> = by.keys().cloned().collect();
    if metric == "dsc30" || metric == "tre30" {
        let rows = by.values().map(|c| worst_tail(metric, c)).collect::<CliResult<Vec<_>>>()?;
        if rows.iter().all(|r| r.is_empty()) {
            return Ok(None);
        }
        if let Some((m, _)) = methods.iter().zip(&rows).find(|(_, r)| r.is_empty()) {
            return Err(CliError::Usage(format!("{metric}: method {m} has no values")));
        }
        return Ok(Some(MetricMatrix::new(metric, direction(metric), Pairing::Unpaired, methods, Vec::new(), rows)?));
    }
    let first = by.values().next().expect("at least one method");
    let cases: Vec<String> = first.keys().cloned().collect();
    for (m, c) in by {
        if c.keys().ne(cases.iter()) {
            return Err(CliError::Usage(format!(
                "unpaired cases: method {m} does not report the same pairs as {}",
                methods[0]
            )));
        }
    }
    let values: Vec<Vec<Option<f64>>> = by
        .values()
        .map(|c| c.values().map(|r| per_case(metric, r)).collect())
        .collect();
    if values.iter().flatten().all(Option::is_none) {
        return Ok(None);
    }
    let mut rows = Vec::with_capacity(values.len());
    for (m, row) in methods.iter().zip(values) {
        let filled: Option<Vec<f64>> = row.into_iter().collect();
        rows.push(filled.ok_or_else(|| CliError::Usage(format!("{metric}: method {m} has cases without a value")))?);
    }
    Ok(Some(MetricMatrix::new(metric, direction(metric), Pairing::Paired, methods, cases, rows)?))
}

pub fn build_leaderboard(reports: &[PairReport], metrics: &[String], alpha: f64) -> CliResult<Leaderboard> {
    if reports.is_empty() {
        return Err(CliError::Usage("no reports to rank".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    for m in metrics {
        if !KNOWN.contains(&m.as_str()) {
            return Err(CliError::Usage(format!("unknown metric {m}; expected one of {KNOWN:?}")));
        }
    }
    let by = group(reports);
    let methods: Vec<String> = by.keys().cloned().collect();
    let cohort = by
        .iter()
        .map(|(m, c)| (m.clone(), CohortStats::from_reports(c.values().copied())))
        .collect();

    if methods.len() == 1 {
        let mut scores = BTreeMap::new();
        let mut used = Vec::new();
        for m in metrics {
            let has = match m.as_str() {
                "dsc30" | "tre30" => !worst_tail(m, &by[&methods[0]])?.is_empty(),
                _ => reports.iter().any(|r| per_case(m, r).is_some()),
            };
            if has {
                scores.insert(m.clone(), BTreeMap::from([(methods[0].clone(), 0.1)]));
                used.push(m.clone());
            }
        }
        let acc: Vec<String> = used.iter().filter(|m| ACC_METRICS.contains(&m.as_str())).cloned().collect();
        if acc.is_empty() {
            return Err(CliError::Usage("none of dsc, hd95, tre is available for ACC".into()));
        }
        let mut table = regeval::ranking::aggregate(&scores, &acc)?;
        for e in &mut table.entries {
            e.wins = used.iter().map(|m| (m.clone(), 0)).collect();
        }
        return Ok(Leaderboard {
            alpha,
            metrics: used,
            table,
            methods,
            pvalues: BTreeMap::new(),
            cohort,
        });
    }

    let mut matrices = Vec::new();
    for m in metrics {
        if let Some(mx) = matrix(m, &by)? {
            matrices.push(mx);
        }
    }
    let used: Vec<String> = matrices.iter().map(|m| m.metric_id.clone()).collect();
    let acc: Vec<String> = used.iter().filter(|m| ACC_METRICS.contains(&m.as_str())).cloned().collect();
    if acc.is_empty() {
        return Err(CliError::Usage("none of dsc, hd95, tre is available for ACC".into()));
    }
    let table = rank(&matrices, &acc, alpha)?;
    let pvalues = matrices
        .iter()
        .map(|m| Ok((m.metric_id.clone(), pairwise_pvalues(m)?)))
        .collect::<CliResult<_>>()?;
    Ok(Leaderboard {
        alpha,
        metrics: used,
        table,
        methods,
        pvalues,
        cohort,
    })
}

const COLUMNS: [&str; 18] = [
    "method", "dsc_mean", "dsc_std", "dsc30_mean", "dsc30_std", "hd95_mean", "hd95_std", "tre_mean", "tre_std",
    "tre30_mean", "tre30_std", "ndv_mean", "ndv_std", "rank_dsc", "rank_hd95", "rank_tre", "acc_score", "final_rank",
];

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn pair(s: &Option<MeanStd>) -> [String; 2] {
    [num(s.as_ref().map(|m| m.mean)), num(s.as_ref().map(|m| m.std))]
}

fn row(e: &RankEntry, c: &CohortStats) -> Vec<String> {
    let mut out = vec![e.method.clone()];
    for s in [&c.dsc, &c.dsc30, &c.hd95, &c.tre, &c.tre30, &c.ndv] {
        out.extend(pair(s));
    }
    for m in ACC_METRICS {
        out.push(num(e.rank_scores.get(m).copied()));
    }
    out.push(e.acc_score.to_string());
    out.push(e.final_rank.to_string());
    out
}

impl Leaderboard {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for e in &self.table.entries {
            w.write_record(row(e, &self.cohort[&e.method])).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
    }
}

pub fn cmd_rank(args: &RankArgs, cli: &Cli) -> CliResult<ExitCode> {
    let reports = load_reports(&args.report_dir)?;
    let board = build_leaderboard(&reports, &args.metrics, args.alpha)?;
    let out = out_dir(&cli.out)?;
    let csv = board.to_csv();
    write_text(&out.join("leaderboard.csv"), &csv)?;
    write_json(&out.join("rank.json"), &board)?;
    print!("{csv}");
    Ok(ExitCode::SUCCESS)
}
