use std::process::ExitCode;

use regeval::warp::ic_residual;
use serde::Serialize;

use crate::args::{Cli, IcArgs};
use crate::io::{out_dir, read_field, read_labels, to_json, write_text};
use crate::CliResult;

#[derive(Debug, Serialize)]
struct IcSummary {
    mae: f64,
    mae_componentwise: f64,
    evaluated: usize,
    excluded: usize,
}

pub fn cmd_ic(args: &IcArgs, cli: &Cli) -> CliResult<ExitCode> {
    let fwd = read_field(&args.forward, cli.units)?;
    let bwd = read_field(&args.backward, cli.units)?;
    let mask = args.mask.as_deref().map(read_labels).transpose()?;
    let r = ic_residual(&fwd, &bwd, mask.as_ref())?;
    let text = to_json(&IcSummary {
        mae: r.mae,
        mae_componentwise: r.mae_componentwise,
        evaluated: r.evaluated,
        excluded: r.excluded,
    });
    print!("{text}");
    if cli.out.is_some() {
        write_text(&out_dir(&cli.out)?.join("ic.json"), &text)?;
    }
    Ok(ExitCode::SUCCESS)
}
