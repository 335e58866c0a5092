use std::process::ExitCode;

use regeval::metrics::{evaluate_pair, PairInputs, PairReport};
use regeval::DisplacementField;
use serde::Serialize;

use crate::args::{Cli, EvalArgs, Units};
use crate::io::{out_dir, read_field, read_labels, read_lms, write_json};
use crate::manifest::{read_manifest, FieldSource, Job};
use crate::CliResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobError {
    pub method: String,
    pub pair_id: String,
    pub error: String,
}

/// Loads every input of `job` and computes its report.
pub fn evaluate_job(job: &Job, units: Units, labels: Option<&[u32]>) -> regeval::Result<PairReport> {
    let fixed = read_labels(&job.fixed_seg)?;
    let moving = read_labels(&job.moving_seg)?;
    let phi = match &job.field {
        FieldSource::Zero => DisplacementField::identity(fixed.header.clone()),
        FieldSource::File(p) => read_field(p, units)?,
    };
    let lms = match &job.landmarks {
        Some((f, m)) => Some((read_lms(f)?, read_lms(m)?)),
        None => None,
    };
    let mask = job.mask.as_deref().map(read_labels).transpose()?;
    let mut inputs = PairInputs::new(&fixed, &moving, &phi);
    inputs.labels = labels;
    inputs.landmarks = lms.as_ref().map(|(f, m)| (f, m));
    inputs.mask = mask.as_ref();
    evaluate_pair(&job.method, &job.pair_id, inputs)
}

pub fn cmd_eval(args: &EvalArgs, cli: &Cli) -> CliResult<ExitCode> {
    let jobs = read_manifest(&args.manifest)?;
    let out = out_dir(&cli.out)?;
    let labels = args.labels.as_deref();
    let results = regeval::par::map_slice(&jobs, |job| evaluate_job(job, cli.units, labels));
    let mut errors = Vec::new();
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(report) => write_json(&out.join(job.report_name()), &report)?,
            Err(e) => errors.push(JobError {
                method: job.method.clone(),
                pair_id: job.pair_id.clone(),
                error: e.to_string(),
            }),
        }
    }
    write_json(&out.join("errors.json"), &errors)?;
    eprintln!("evaluated {} of {} jobs", jobs.len() - errors.len(), jobs.len());
    for e in &errors {
        eprintln!("  {} {}: {}", e.method, e.pair_id, e.error);
    }
    Ok(if errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
