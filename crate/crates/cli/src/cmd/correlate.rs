use std::collections::BTreeMap;
use std::process::ExitCode;

use regeval::metrics::PairReport;
use regeval::stats::{dsc30, pearson_fit, tre30};
use serde::Serialize;

use crate::args::{Cli, CorrelateArgs};
use crate::cmd::load_reports;
use crate::io::{out_dir, write_text};
use crate::{CliError, CliResult};

const METRICS: [&str; 7] = ["dsc", "dsc30", "hd95", "tre", "tre30", "ndv", "ic_mae"];

/// Per-case scalar of a report.
pub fn metric_value(metric: &str, r: &PairReport) -> Option<f64> {
    match metric {
        "dsc" => r.dsc_mean,
        "hd95" => r.hd95_mean,
        "tre" => r.tre_mean,
        "ndv" => Some(r.ndv),
        "ic_mae" => r.ic_mae,
        "dsc30" => {
            let v: Vec<f64> = r.dsc_per_label.values().filter_map(|v| *v).collect();
            dsc30(&v).ok()
        }
        "tre30" => tre30(&r.tre_per_landmark).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub method: String,
    pub n: usize,
    pub r: Option<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `ok`, or `degenerate` when the fit is undefined.
    pub status: String,
}

pub fn correlate(reports: &[PairReport], x: &str, y: &str) -> CliResult<Vec<CorrelationRow>> {
    for m in [x, y] {
        if !METRICS.contains(&m) {
            return Err(CliError::Usage(format!("unknown metric {m}; expected one of {METRICS:?}")));
        }
    }
    let mut by: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in reports {
        let e = by.entry(&r.method_id).or_default();
        if let (Some(a), Some(b)) = (metric_value(x, r), metric_value(y, r)) {
            e.0.push(a);
            e.1.push(b);
        }
    }
    Ok(by
        .into_iter()
        .map(|(m, (xs, ys))| match pearson_fit(&xs, &ys) {
            Ok(f) => CorrelationRow {
                method: m.to_string(),
                n: xs.len(),
                r: Some(f.r),
                slope: Some(f.slope),
                intercept: Some(f.intercept),
                status: "ok".into(),
            },
            Err(_) => CorrelationRow {
                method: m.to_string(),
                n: xs.len(),
                r: None,
                slope: None,
                intercept: None,
                status: "degenerate".into(),
            },
        })
        .collect())
}

pub fn cmd_correlate(args: &CorrelateArgs, cli: &Cli) -> CliResult<ExitCode> {
    let reports = load_reports(&args.report_dir)?;
    let rows = correlate(&reports, &args.x, &args.y)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let text = String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv");
    if cli.out.is_some() {
        write_text(&out_dir(&cli.out)?.join("correlation.csv"), &text)?;
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}
