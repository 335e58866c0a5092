use std::process::ExitCode;

use regeval::refreg::{instance_optimize, register, Parameterization, RegConfig};
use regeval::warp::DEFAULT_SQUARINGS;

use crate::args::{Cli, RegisterArgs};
use crate::io::{out_dir, read_field, read_scalar, write_field, write_json};
use crate::{CliError, CliResult};

pub fn cmd_register(args: &RegisterArgs, cli: &Cli) -> CliResult<ExitCode> {
    let mut cfg: RegConfig = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => RegConfig::default(),
    };
    if args.svf {
        cfg.parameterization = Parameterization::Svf {
            squarings: DEFAULT_SQUARINGS,
        };
    }
    cfg.seed = cli.seed;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let fixed = read_scalar(&args.fixed)?;
    let moving = read_scalar(&args.moving)?;
    let reg = match &args.init {
        Some(p) => instance_optimize(&fixed, &moving, &read_field(p, cli.units)?, &cfg)?,
        None => register(&fixed, &moving, &cfg)?,
    };
    let out = out_dir(&cli.out)?;
    write_json(&out.join("trace.json"), &reg.trace)?;
    write_field(reg.field, &out.join(&args.name), cli.units)?;
    Ok(ExitCode::SUCCESS)
}
