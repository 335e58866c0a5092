use std::process::ExitCode;
use std::time::Instant;

use regeval::metrics::{evaluate_pair, PairInputs};
use regeval::stats::mean_std;
use serde::Serialize;

use crate::args::{BenchArgs, Cli};
use crate::cmd::evaluate_job;
use crate::io::{out_dir, read_labels, to_json, write_json, write_text};
use crate::manifest::{read_manifest, FieldSource};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub method: String,
    pub pair_id: String,
    pub repeats: usize,
    pub in_memory: bool,
    pub samples_s: Vec<f64>,
    pub mean_s: f64,
    pub std_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

pub fn cmd_bench(args: &BenchArgs, cli: &Cli) -> CliResult<ExitCode> {
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be positive".into()));
    }
    let jobs = read_manifest(&args.manifest)?;
    let job = jobs
        .get(args.job)
        .ok_or_else(|| CliError::Usage(format!("job {} out of range ({} rows)", args.job, jobs.len())))?;
    let out = out_dir(&cli.out)?;
    let scratch = out.join(job.report_name());
    let mut samples = Vec::with_capacity(args.repeats);
    if args.in_memory {
        let fixed = read_labels(&job.fixed_seg)?;
        let moving = read_labels(&job.moving_seg)?;
        let phi = match &job.field {
            FieldSource::Zero => regeval::DisplacementField::identity(fixed.header.clone()),
            FieldSource::File(p) => crate::io::read_field(p, cli.units)?,
        };
        for _ in 0..args.repeats {
            let t = Instant::now();
            let r = evaluate_pair(&job.method, &job.pair_id, PairInputs::new(&fixed, &moving, &phi))?;
            samples.push(t.elapsed().as_secs_f64());
            std::hint::black_box(r);
        }
    } else {
        for _ in 0..args.repeats {
            let t = Instant::now();
            let r = evaluate_job(job, cli.units, None)?;
            write_text(&scratch, &to_json(&r))?;
            samples.push(t.elapsed().as_secs_f64());
        }
    }
    let ms = mean_std(&samples).expect("non-empty samples");
    let result = BenchResult {
        method: job.method.clone(),
        pair_id: job.pair_id.clone(),
        repeats: args.repeats,
        in_memory: args.in_memory,
        mean_s: ms.mean,
        std_s: ms.std,
        min_s: samples.iter().copied().fold(f64::INFINITY, f64::min),
        max_s: samples.iter().copied().fold(0.0, f64::max),
        samples_s: samples,
    };
    write_json(&out.join("bench.json"), &result)?;
    print!("{}", to_json(&result));
    Ok(ExitCode::SUCCESS)
}
