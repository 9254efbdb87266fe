mod args;
mod embed;
mod output;
mod pencil;
mod solve;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, LdeCommand, NpeCommand, OracleCommand, VqgeCommand};

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Vqge(VqgeCommand::Solve(a)) => solve::vqge(cli, a, false),
        Command::Vqge(VqgeCommand::Scan(a)) => solve::vqge(cli, a, true),
        Command::Oracle(OracleCommand::Eig(a)) => solve::oracle_eig(cli, a),
        Command::Npe(NpeCommand::Fit(a)) => embed::npe_fit(cli, a),
        Command::Npe(NpeCommand::Transform(a)) => embed::transform(cli, a),
        Command::Lde(LdeCommand::Fit(a)) => embed::lde_fit(cli, a),
        Command::Lde(LdeCommand::Classify(a)) => embed::lde_classify(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
