//! `popsim verify`: final-configuration histograms against the exact law.

use std::collections::BTreeMap;
use std::fmt;

use popsim::batched::Heuristics;
use popsim::oracle::{chi_square_configs, exact_distribution, total_variation, ConfigDistribution};
use popsim::protocol::Protocol;
use popsim::sim::{SimConfig, Simulator};
use popsim::{derive_seed, simulate, Configuration, RngStream};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::protocols::instantiate_spec;
use crate::run::pool;
use crate::spec::ExperimentSpec;

pub const TV_TOLERANCE: f64 = 0.005;
pub const P_VALUE_FLOOR: f64 = 1e-6;
pub const MAX_AGENTS: u64 = 8;
pub const MAX_HORIZON: u64 = 10;

const CHUNK: u64 = 1 << 14;

pub type Histogram = BTreeMap<Vec<u64>, u64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub label: String,
    pub runs: u64,
    pub tv: f64,
    pub p_value: f64,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.tv <= TV_TOLERANCE && self.p_value >= P_VALUE_FLOOR
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: tv={:.5} p={:.3e} runs={}",
            if self.pass() { "PASS" } else { "FAIL" },
            self.label,
            self.tv,
            self.p_value,
            self.runs
        )
    }
}

/// Histogram of `run` over `runs` seeds derived from `seed`, computed on
/// the current rayon pool. The result does not depend on the thread count.
pub fn histogram<F>(runs: u64, seed: u64, run: F) -> CliResult<Histogram>
where
    F: Fn(&mut RngStream) -> popsim::Result<Vec<u64>> + Sync,
{
    (0..runs.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut local = Histogram::new();
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(runs) {
                let mut rng = RngStream::new(derive_seed(seed, i));
                *local.entry(run(&mut rng)?).or_insert(0) += 1;
            }
            Ok(local)
        })
        .try_reduce(Histogram::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            Ok(a)
        })
}

pub fn judge(
    label: impl Into<String>,
    observed: &Histogram,
    exact: &ConfigDistribution,
) -> CliResult<Verdict> {
    Ok(Verdict {
        label: label.into(),
        runs: observed.values().sum(),
        tv: total_variation(&ConfigDistribution::empirical(observed), exact),
        p_value: chi_square_configs(observed, exact)?,
    })
}

/// Simulation settings used for oracle comparisons: the alias table's
/// `q² ≤ n` bound is lifted because oracle instances are tiny.
pub fn oracle_config(simulator: Simulator, heuristics: Heuristics, horizon: u64) -> SimConfig {
    let mut config = SimConfig::new(simulator, horizon);
    config.heuristics = heuristics;
    config.alias.enforce_size_bound = false;
    config
}

#[allow(clippy::too_many_arguments)]
pub fn verify_simulator(
    simulator: Simulator,
    heuristics: Heuristics,
    protocol: &dyn Protocol,
    initial: &Configuration,
    horizon: u64,
    runs: u64,
    seed: u64,
    exact: &ConfigDistribution,
) -> CliResult<Verdict> {
    let config = oracle_config(simulator, heuristics, horizon);
    let observed = histogram(runs, seed, |rng| {
        Ok(simulate(&config, protocol, initial, rng, &mut |_, _| {})?
            .configuration
            .into_counts())
    })?;
    judge(simulator.name(), &observed, exact)
}

/// Runs every simulator on the spec's protocol and start.
pub fn cmd_verify(spec: &ExperimentSpec) -> CliResult<Vec<Verdict>> {
    if spec.agents > MAX_AGENTS || spec.interactions > MAX_HORIZON {
        return Err(CliError::Invalid(format!(
            "verify needs agents <= {MAX_AGENTS} and interactions <= {MAX_HORIZON}, got {} and {}",
            spec.agents, spec.interactions
        )));
    }
    ExperimentSpec {
        simulator: Simulator::Batched,
        ..spec.clone()
    }
    .validate()?;
    let instance = instantiate_spec(spec)?;
    let exact = exact_distribution(&*instance.protocol, &instance.initial, spec.interactions)?;
    pool(spec.threads)?.install(|| {
        Simulator::ALL
            .into_iter()
            .map(|sim| {
                verify_simulator(
                    sim,
                    spec.heuristics.into(),
                    &*instance.protocol,
                    &instance.initial,
                    spec.interactions,
                    spec.repetitions,
                    spec.seed,
                    &exact,
                )
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_does_not_depend_on_threads() {
        let run = |rng: &mut RngStream| Ok(vec![rng.below(5), rng.below(3)]);
        let one = pool(1)
            .unwrap()
            .install(|| histogram(40_000, 9, run))
            .unwrap();
        let three = pool(3)
            .unwrap()
            .install(|| histogram(40_000, 9, run))
            .unwrap();
        assert_eq!(one, three);
        assert_eq!(one.values().sum::<u64>(), 40_000);
    }

    #[test]
    fn judge_thresholds() {
        let exact = ConfigDistribution::point(&Configuration::new(vec![1, 1]));
        let hit = Histogram::from([(vec![1, 1], 100)]);
        let v = judge("x", &hit, &exact).unwrap();
        assert_eq!((v.tv, v.p_value, v.runs), (0.0, 1.0, 100));
        assert!(v.pass());
        let miss = Histogram::from([(vec![1, 1], 99), (vec![2, 0], 1)]);
        let v = judge("x", &miss, &exact).unwrap();
        assert!((v.tv - 0.01).abs() < 1e-12);
        assert!(!v.pass());
        assert!(v.to_string().starts_with("FAIL x:"));
    }
}
