//! One entry point over all six simulators.

use std::fmt;
use std::str::FromStr;

use crate::batched::{run_batched, BatchMode, BatchOptions, BatchStats, EpochPolicy, Heuristics};
use crate::protocol::Protocol;
use crate::sequential::run_sequential;
use crate::urn::{AliasParams, ArrayUrn, BstUrn, DynamicAliasTable, LinearUrn, Urn, UrnBackend};
use crate::{Configuration, Error, Result, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Simulator {
    Sequential(UrnBackend),
    Batched,
    MultiBatched,
}

impl Simulator {
    pub const ALL: [Simulator; 6] = [
        Simulator::Sequential(UrnBackend::Array),
        Simulator::Sequential(UrnBackend::Linear),
        Simulator::Sequential(UrnBackend::Bst),
        Simulator::Sequential(UrnBackend::Alias),
        Simulator::Batched,
        Simulator::MultiBatched,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Simulator::Sequential(UrnBackend::Array) => "seq-array",
            Simulator::Sequential(UrnBackend::Linear) => "seq-linear",
            Simulator::Sequential(UrnBackend::Bst) => "seq-bst",
            Simulator::Sequential(UrnBackend::Alias) => "seq-alias",
            Simulator::Batched => "batched",
            Simulator::MultiBatched => "multibatched",
        }
    }

    pub fn is_batched(self) -> bool {
        matches!(self, Simulator::Batched | Simulator::MultiBatched)
    }
}

impl fmt::Display for Simulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Simulator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Simulator::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown simulator `{s}`")))
    }
}

/// Everything a single run needs besides the protocol and the start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub simulator: Simulator,
    pub interactions: u64,
    pub snapshot_every: u64,
    pub heuristics: Heuristics,
    pub alias: AliasParams,
    pub epoch_policy: Option<EpochPolicy>,
}

impl SimConfig {
    pub fn new(simulator: Simulator, interactions: u64) -> Self {
        SimConfig {
            simulator,
            interactions,
            snapshot_every: interactions.max(1),
            heuristics: Heuristics::default(),
            alias: AliasParams::default(),
            epoch_policy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub configuration: Configuration,
    pub interactions: u64,
    /// Batch counters; zero for sequential simulators.
    pub stats: BatchStats,
}

/// Simulates `config.interactions` interactions from `initial`.
pub fn simulate<P: Protocol + ?Sized>(
    config: &SimConfig,
    protocol: &P,
    initial: &Configuration,
    rng: &mut RngStream,
    sink: &mut dyn FnMut(u64, &[u64]),
) -> Result<RunOutcome> {
    let n = config.interactions;
    let every = config.snapshot_every;
    let sequential = |urn: &mut dyn Urn, rng: &mut RngStream, sink: &mut dyn FnMut(u64, &[u64])| {
        run_sequential(urn, protocol, n, every, rng, sink)?;
        Ok::<_, Error>(RunOutcome {
            configuration: urn.configuration(),
            interactions: n,
            stats: BatchStats::default(),
        })
    };
    match config.simulator {
        Simulator::Sequential(UrnBackend::Array) => {
            sequential(&mut ArrayUrn::new(initial), rng, sink)
        }
        Simulator::Sequential(UrnBackend::Linear) => sequential(
            &mut LinearUrn::with_renaming(initial, config.heuristics.renaming),
            rng,
            sink,
        ),
        Simulator::Sequential(UrnBackend::Bst) => sequential(&mut BstUrn::new(initial), rng, sink),
        Simulator::Sequential(UrnBackend::Alias) => sequential(
            &mut DynamicAliasTable::with_params(initial, config.alias)?,
            rng,
            sink,
        ),
        Simulator::Batched | Simulator::MultiBatched => {
            let mode = if config.simulator == Simulator::Batched {
                BatchMode::Batched
            } else {
                BatchMode::MultiBatched
            };
            let options = BatchOptions {
                mode,
                heuristics: config.heuristics,
                epoch_policy: config.epoch_policy,
            };
            let (configuration, stats) =
                run_batched(protocol, initial, n, every, &options, rng, sink)?;
            Ok(RunOutcome {
                configuration,
                interactions: stats.interactions,
                stats,
            })
        }
    }
}
