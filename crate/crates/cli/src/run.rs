//! `popsim run`: independent repetitions with per-run snapshot CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use popsim::{derive_seed, simulate, RngStream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliResult};
use crate::protocols::{instantiate_spec, Instance};
use crate::spec::ExperimentSpec;

pub const MANIFEST: &str = "manifest.json";

const SNAPSHOT_NOTE: &str = "Each row is the configuration after exactly t interactions. Rows are \
written at t = 0, at every multiple of snapshot_every and at t = interactions.";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: ExperimentSpec,
    pub snapshots: String,
    pub runs: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub manifest: PathBuf,
    pub files: Vec<PathBuf>,
    /// Final configuration of each run, in run order.
    pub finals: Vec<Vec<u64>>,
}

pub fn run_file_name(index: u64) -> String {
    format!("run-{index}.csv")
}

/// Executes one repetition and returns its CSV and final counts.
pub fn run_once(
    spec: &ExperimentSpec,
    instance: &Instance,
    index: u64,
) -> CliResult<(String, Vec<u64>)> {
    let q = instance.protocol.num_states();
    let mut csv = String::from("t");
    for i in 0..q {
        write!(csv, ",count_{i}").unwrap();
    }
    csv.push('\n');
    let mut rng = RngStream::new(derive_seed(spec.seed, index));
    let outcome = simulate(
        &spec.sim_config(),
        &*instance.protocol,
        &instance.initial,
        &mut rng,
        &mut |t, counts| {
            write!(csv, "{t}").unwrap();
            for c in counts {
                write!(csv, ",{c}").unwrap();
            }
            csv.push('\n');
        },
    )?;
    Ok((csv, outcome.configuration.into_counts()))
}

pub(crate) fn pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?)
}

pub fn cmd_run(spec: &ExperimentSpec) -> CliResult<RunSummary> {
    spec.validate()?;
    let instance = instantiate_spec(spec)?;
    fs::create_dir_all(&spec.out).map_err(io_error(&spec.out))?;
    let results = pool(spec.threads)?.install(|| {
        (0..spec.repetitions)
            .into_par_iter()
            .map(|i| {
                let (csv, counts) = run_once(spec, &instance, i)?;
                let path = spec.out.join(run_file_name(i));
                fs::write(&path, csv).map_err(io_error(&path))?;
                Ok((path, counts))
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let (files, finals): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let manifest = Manifest {
        spec: spec.clone(),
        snapshots: SNAPSHOT_NOTE.into(),
        runs: (0..spec.repetitions).map(run_file_name).collect(),
    };
    let path = spec.out.join(MANIFEST);
    write_manifest(&path, &manifest)?;
    Ok(RunSummary {
        manifest: path,
        files,
        finals,
    })
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> CliResult<()> {
    let mut json = serde_json::to_string_pretty(manifest)?;
    json.push('\n');
    fs::write(path, json).map_err(io_error(path))
}

pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    Ok(serde_json::from_str(&text)?)
}
