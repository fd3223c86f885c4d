//! Command-line grammar and its translation into [`ExperimentSpec`]s.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use popsim::sim::Simulator;

use crate::bench::{bench_csv, cmd_bench};
use crate::error::{io_error, CliError, CliResult};
use crate::run::cmd_run;
use crate::spec::{ExperimentSpec, HeuristicFlags, ProtocolName};
use crate::verify::cmd_verify;

#[derive(Debug, Parser)]
#[command(name = "popsim", version, about = "Population protocol simulators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate independent runs and write one snapshot CSV per run.
    Run(CommonArgs),
    /// Measure nanoseconds per interaction for every simulator and n given.
    Bench(CommonArgs),
    /// Compare every simulator against the exact distribution on a tiny instance.
    Verify(CommonArgs),
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = ProtocolName::LeaderElection)]
    pub protocol: ProtocolName,
    /// Comma-separated simulator names.
    #[arg(long, value_delimiter = ',', default_value = "multibatched")]
    pub simulator: Vec<Simulator>,
    /// Comma-separated population sizes.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub agents: Vec<u64>,
    /// Interactions per run [default: agents].
    #[arg(long)]
    pub interactions: Option<u64>,
    /// Number of states [default: depends on the protocol].
    #[arg(long)]
    pub states: Option<usize>,
    /// Seed of the random two-way transition table.
    #[arg(long, default_value_t = 0)]
    pub table_seed: u64,
    /// Snapshot interval [default: interactions].
    #[arg(long)]
    pub snapshot_every: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions [default: 1 for run, 5 for bench, 10^6 for verify].
    #[arg(long)]
    pub reps: Option<u64>,
    /// Worker threads [default: available cores].
    #[arg(long, env = "POPSIM_THREADS")]
    pub threads: Option<usize>,
    /// Comma list of renaming, partitioning, skipping, controller, or all / none.
    #[arg(long, default_value = "all")]
    pub heuristics: HeuristicFlags,
    #[arg(long, default_value = "popsim-out")]
    pub out: PathBuf,
}

impl CommonArgs {
    /// One spec per (simulator, agents) pair, simulators outermost.
    pub fn specs(&self, default_reps: u64) -> Vec<ExperimentSpec> {
        let threads = self
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let mut specs = Vec::new();
        for &simulator in &self.simulator {
            for &agents in &self.agents {
                let interactions = self.interactions.unwrap_or(agents);
                specs.push(ExperimentSpec {
                    protocol: self.protocol,
                    states: self.states.unwrap_or(self.protocol.default_states()),
                    table_seed: self.table_seed,
                    simulator,
                    agents,
                    interactions,
                    snapshot_every: self.snapshot_every.unwrap_or(interactions.max(1)),
                    seed: self.seed,
                    repetitions: self.reps.unwrap_or(default_reps),
                    threads,
                    heuristics: self.heuristics,
                    out: self.out.clone(),
                });
            }
        }
        specs
    }

    fn single(&self, default_reps: u64, what: &str) -> CliResult<ExperimentSpec> {
        match self.specs(default_reps).as_slice() {
            [spec] => Ok(spec.clone()),
            _ => Err(CliError::Invalid(format!(
                "{what} takes a single simulator and a single population size"
            ))),
        }
    }
}

/// Runs a parsed command; `Ok(false)` means a verification failed.
pub fn execute(command: &Command) -> CliResult<bool> {
    match command {
        Command::Run(args) => {
            let spec = args.single(1, "run")?;
            let summary = cmd_run(&spec)?;
            println!(
                "wrote {} runs and {}",
                summary.files.len(),
                summary.manifest.display()
            );
            Ok(true)
        }
        Command::Bench(args) => {
            let rows = cmd_bench(&args.specs(5))?;
            let csv = bench_csv(&rows);
            fs::create_dir_all(&args.out).map_err(io_error(&args.out))?;
            let path = args.out.join("bench.csv");
            fs::write(&path, &csv).map_err(io_error(&path))?;
            print!("{csv}");
            Ok(true)
        }
        Command::Verify(args) => {
            let mut args = args.clone();
            args.simulator.truncate(1);
            let spec = args.single(1_000_000, "verify")?;
            let verdicts = cmd_verify(&spec)?;
            for v in &verdicts {
                println!("{v}");
            }
            Ok(verdicts.iter().all(|v| v.pass()))
        }
    }
}
