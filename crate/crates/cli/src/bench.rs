//! `popsim bench`: time per interaction, setup excluded.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use popsim::{derive_seed, simulate, RngStream};
use rayon::prelude::*;
use statrs::statistics::{Data, Distribution, Median};

use crate::error::{CliError, CliResult};
use crate::protocols::{instantiate_spec, Instance};
use crate::run::pool;
use crate::spec::ExperimentSpec;

pub const MIN_REPETITIONS: u64 = 5;

pub const BENCH_HEADER: &str =
    "simulator,protocol,n,q,threads,ns_per_interaction_median,ns_per_interaction_sd";

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub simulator: String,
    pub protocol: String,
    pub n: u64,
    pub q: usize,
    pub threads: usize,
    pub ns_per_interaction_median: f64,
    pub ns_per_interaction_sd: f64,
    /// Individual measurements, in repetition order.
    pub samples: Vec<f64>,
}

/// Interaction-loop time of one run; the clock starts at the `t = 0`
/// snapshot, which every simulator emits once its setup is complete.
pub fn timed_run(spec: &ExperimentSpec, instance: &Instance, index: u64) -> CliResult<Duration> {
    let mut config = spec.sim_config();
    config.snapshot_every = spec.interactions.max(1);
    let mut rng = RngStream::new(derive_seed(spec.seed, index));
    let mut start = None;
    simulate(
        &config,
        &*instance.protocol,
        &instance.initial,
        &mut rng,
        &mut |t, _| {
            if t == 0 {
                start = Some(Instant::now());
            }
        },
    )?;
    Ok(start.expect("simulators always report t = 0").elapsed())
}

/// Measures one (simulator, n) cell.
///
/// Each repetition runs `threads` independent simulations at once and
/// records the slowest loop time divided by `threads · N`, so the reported value is
/// aggregate time per interaction.
pub fn bench_one(spec: &ExperimentSpec) -> CliResult<BenchRow> {
    spec.validate()?;
    if spec.repetitions < MIN_REPETITIONS {
        return Err(CliError::Invalid(format!(
            "benchmarks need at least {MIN_REPETITIONS} repetitions, got {}",
            spec.repetitions
        )));
    }
    if spec.interactions == 0 {
        return Err(CliError::Invalid(
            "benchmarks need at least one interaction".into(),
        ));
    }
    let instance = instantiate_spec(spec)?;
    let workers = pool(spec.threads)?;
    let threads = spec.threads as u64;
    let mut samples = Vec::with_capacity(spec.repetitions as usize);
    for rep in 0..spec.repetitions {
        let slowest = workers.install(|| {
            (0..threads)
                .into_par_iter()
                .map(|j| timed_run(spec, &instance, rep * threads + j))
                .try_reduce(|| Duration::ZERO, |a, b| Ok(a.max(b)))
        })?;
        samples.push(slowest.as_nanos() as f64 / (threads * spec.interactions) as f64);
    }
    let data = Data::new(samples.clone());
    Ok(BenchRow {
        simulator: spec.simulator.name().into(),
        protocol: spec.protocol.name().into(),
        n: spec.agents,
        q: spec.states,
        threads: spec.threads,
        ns_per_interaction_median: data.median(),
        ns_per_interaction_sd: data.std_dev().unwrap_or(0.0),
        samples,
    })
}

/// One row per spec, in order.
pub fn cmd_bench(specs: &[ExperimentSpec]) -> CliResult<Vec<BenchRow>> {
    specs.iter().map(bench_one).collect()
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.simulator,
            r.protocol,
            r.n,
            r.q,
            r.threads,
            r.ns_per_interaction_median,
            r.ns_per_interaction_sd
        )
        .unwrap();
    }
    out
}
