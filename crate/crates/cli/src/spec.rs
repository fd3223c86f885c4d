//! Resolved experiment description shared by every subcommand.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use popsim::batched::Heuristics;
use popsim::sim::{SimConfig, Simulator};
use popsim::urn::{AliasParams, UrnBackend};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolName {
    LeaderElection,
    UniformClock,
    RunningClock,
    RandomTwoWay,
    Identity,
    Swap,
    CoinIncrement,
}

impl ProtocolName {
    pub const ALL: [ProtocolName; 7] = [
        ProtocolName::LeaderElection,
        ProtocolName::UniformClock,
        ProtocolName::RunningClock,
        ProtocolName::RandomTwoWay,
        ProtocolName::Identity,
        ProtocolName::Swap,
        ProtocolName::CoinIncrement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolName::LeaderElection => "leader-election",
            ProtocolName::UniformClock => "uniform-clock",
            ProtocolName::RunningClock => "running-clock",
            ProtocolName::RandomTwoWay => "random-two-way",
            ProtocolName::Identity => "identity",
            ProtocolName::Swap => "swap",
            ProtocolName::CoinIncrement => "coin-increment",
        }
    }

    /// State count used when `--states` is not given.
    pub fn default_states(self) -> usize {
        match self {
            ProtocolName::LeaderElection | ProtocolName::Identity | ProtocolName::Swap => 2,
            ProtocolName::UniformClock | ProtocolName::RunningClock => 8,
            ProtocolName::RandomTwoWay => 3,
            ProtocolName::CoinIncrement => 4,
        }
    }
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Heuristic toggles, written on the command line as a comma list
/// (`renaming,partitioning,skipping,controller`, `all` or `none`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicFlags {
    pub renaming: bool,
    pub partitioning: bool,
    pub skipping: bool,
    pub controller: bool,
}

impl HeuristicFlags {
    pub const ALL: HeuristicFlags = HeuristicFlags {
        renaming: true,
        partitioning: true,
        skipping: true,
        controller: true,
    };
    pub const NONE: HeuristicFlags = HeuristicFlags {
        renaming: false,
        partitioning: false,
        skipping: false,
        controller: false,
    };
}

impl Default for HeuristicFlags {
    fn default() -> Self {
        HeuristicFlags::ALL
    }
}

impl From<HeuristicFlags> for Heuristics {
    fn from(h: HeuristicFlags) -> Self {
        Heuristics {
            renaming: h.renaming,
            partitioning: h.partitioning,
            skipping: h.skipping,
            controller: h.controller,
        }
    }
}

impl FromStr for HeuristicFlags {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let mut flags = HeuristicFlags::NONE;
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "all" => flags = HeuristicFlags::ALL,
                "none" => flags = HeuristicFlags::NONE,
                "renaming" => flags.renaming = true,
                "partitioning" => flags.partitioning = true,
                "skipping" => flags.skipping = true,
                "controller" => flags.controller = true,
                other => return Err(CliError::Invalid(format!("unknown heuristic '{other}'"))),
            }
        }
        Ok(flags)
    }
}

impl fmt::Display for HeuristicFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.renaming, "renaming"),
            (self.partitioning, "partitioning"),
            (self.skipping, "skipping"),
            (self.controller, "controller"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

mod simulator_name {
    use popsim::sim::Simulator;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(sim: &Simulator, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(sim.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Simulator, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub protocol: ProtocolName,
    pub states: usize,
    /// Seed of the random two-way table; unused by other protocols.
    pub table_seed: u64,
    #[serde(with = "simulator_name")]
    pub simulator: Simulator,
    pub agents: u64,
    pub interactions: u64,
    pub snapshot_every: u64,
    pub seed: u64,
    pub repetitions: u64,
    pub threads: usize,
    pub heuristics: HeuristicFlags,
    pub out: PathBuf,
}

impl ExperimentSpec {
    /// A single run of `N = n` interactions with one snapshot at the end.
    pub fn new(protocol: ProtocolName, simulator: Simulator, agents: u64) -> Self {
        ExperimentSpec {
            protocol,
            states: protocol.default_states(),
            table_seed: 0,
            simulator,
            agents,
            interactions: agents,
            snapshot_every: agents.max(1),
            seed: 0,
            repetitions: 1,
            threads: 1,
            heuristics: HeuristicFlags::ALL,
            out: PathBuf::from("popsim-out"),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let invalid = |msg: String| Err(CliError::Invalid(msg));
        if self.agents < 2 {
            return invalid(format!("need at least 2 agents, got {}", self.agents));
        }
        for (name, value) in [
            ("snapshot interval", self.snapshot_every),
            ("repetitions", self.repetitions),
            ("threads", self.threads as u64),
            ("states", self.states as u64),
        ] {
            if value == 0 {
                return invalid(format!("{name} must be positive"));
            }
        }
        let q = self.states;
        match self.protocol {
            ProtocolName::LeaderElection if q != 2 => {
                return invalid(format!("leader-election has 2 states, got {q}"))
            }
            ProtocolName::UniformClock | ProtocolName::RunningClock
                if q < 4 || !q.is_multiple_of(2) =>
            {
                return invalid(format!(
                    "phase clocks need an even state count >= 4, got {q}"
                ))
            }
            _ => {}
        }
        if self.simulator == Simulator::Sequential(UrnBackend::Alias)
            && (q as u128) * (q as u128) > self.agents as u128
        {
            return invalid(format!(
                "seq-alias needs states^2 <= agents, got {q}^2 > {}",
                self.agents
            ));
        }
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            snapshot_every: self.snapshot_every,
            heuristics: self.heuristics.into(),
            alias: AliasParams::default(),
            ..SimConfig::new(self.simulator, self.interactions)
        }
    }
}
