//! Monte-Carlo sweeps, text formats and the `mixcore` command-line front end.

pub mod args;
pub mod commands;
pub mod experiment;
pub mod formats;

use args::{Cli, Command};
use commands::CommandOutcome;

pub fn dispatch(cli: &Cli) -> CommandOutcome {
    let p = cli.precision;
    match &cli.command {
        Command::Optimize(a) => commands::cmd_optimize(a, p),
        Command::Table(a) => commands::cmd_table(a, p),
        Command::Simulate(a) => commands::cmd_simulate(a, p),
        Command::Fit(a) => commands::cmd_fit(a, p),
        Command::Generate(a) => commands::cmd_generate(a),
        Command::Peel(a) => commands::cmd_peel(a),
        Command::RetrievalDemo(a) => commands::cmd_retrieval_demo(a, p),
    }
}
