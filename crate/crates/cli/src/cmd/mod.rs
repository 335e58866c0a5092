mod bench;
mod correlate;
mod eval;
mod ic;
mod rank;
mod register;
mod synth;

use std::process::ExitCode;

pub use bench::{cmd_bench, BenchResult};
pub use correlate::{cmd_correlate, metric_value, CorrelationRow};
pub use eval::{cmd_eval, evaluate_job, JobError};
pub use ic::cmd_ic;
pub use rank::{build_leaderboard, cmd_rank, load_reports, Leaderboard};
pub use register::cmd_register;
pub use synth::cmd_synth;

use crate::args::{Cli, Command};
use crate::CliResult;

pub fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, &cli),
        Command::Rank(a) => cmd_rank(a, &cli),
        Command::Ic(a) => cmd_ic(a, &cli),
        Command::Correlate(a) => cmd_correlate(a, &cli),
        Command::Bench(a) => cmd_bench(a, &cli),
        Command::Synth(a) => cmd_synth(a, &cli),
        Command::Register(a) => cmd_register(a, &cli),
    }
}
