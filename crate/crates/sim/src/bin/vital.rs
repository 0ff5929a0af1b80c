use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vital_sim::compare::{compare, write_csv, CompareError};
use vital_sim::{run_scenario_with, RunOptions, Scenario};

#[derive(Parser)]
#[command(name = "vital", about = "Run and compare terrain-aware locomotion scenarios")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write its CSV logs.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Write the criteria grids behind every foothold decision.
        #[arg(long)]
        dump_criteria: bool,
        /// Write the safe-count samples and fitted weights of every planner tick.
        #[arg(long)]
        dump_rbf: bool,
    },
    /// Run two scenarios that differ in one key and print paired aggregates.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        pair: String,
    },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run { scenario, out, dump_criteria, dump_rbf } => {
            let sc = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let run = match run_scenario_with(&sc, RunOptions { dump_criteria, dump_rbf }) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Err(e) = std::fs::create_dir_all(&out).map_err(anyhow::Error::from).and_then(|_| run.write(&out)) {
                eprintln!("error: writing {}: {e:#}", out.display());
                return ExitCode::from(1);
            }
            for (k, v) in run.metrics.rows() {
                println!("{k} = {v}");
            }
            if run.metrics.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Cmd::Compare { a, b, pair } => {
            let load = |p: &PathBuf| Scenario::load(p).map_err(CompareError::from);
            let rows = load(&a).and_then(|sa| load(&b).and_then(|sb| compare(&sa, &sb, &pair)));
            match rows {
                Ok(rows) => match write_csv(&rows, std::io::stdout().lock()) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(1)
                    }
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
