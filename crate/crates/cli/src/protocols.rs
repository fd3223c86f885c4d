use popsim::protocol::{
    coin_increment, identity, leader_election, phase_clock, random_two_way, running_clock_initial,
    swap, Protocol, LEADER,
};
use popsim::Configuration;

use crate::error::CliResult;
use crate::spec::{ExperimentSpec, ProtocolName};

/// A protocol together with its starting configuration.
pub struct Instance {
    pub protocol: Box<dyn Protocol>,
    pub initial: Configuration,
}

/// Builds the named protocol over `states` states and its canonical start
/// with `agents` agents:
/// leader election starts with every agent a leader, the running clock with
/// `⌊√n⌋` marked agents in phase 0, coin increment with everyone in state 0,
/// and the rest spread evenly over all states.
pub fn instantiate(
    name: ProtocolName,
    states: usize,
    table_seed: u64,
    agents: u64,
) -> CliResult<Instance> {
    let q = states;
    let (protocol, initial): (Box<dyn Protocol>, Configuration) = match name {
        ProtocolName::LeaderElection => (
            Box::new(leader_election()),
            Configuration::uniform_state(2, LEADER, agents)?,
        ),
        ProtocolName::UniformClock => (Box::new(phase_clock(q)?), Configuration::spread(q, agents)),
        ProtocolName::RunningClock => (Box::new(phase_clock(q)?), running_clock_initial(q, agents)),
        ProtocolName::RandomTwoWay => (
            Box::new(random_two_way(q, table_seed)?),
            Configuration::spread(q, agents),
        ),
        ProtocolName::Identity => (Box::new(identity(q)?), Configuration::spread(q, agents)),
        ProtocolName::Swap => (Box::new(swap(q)?), Configuration::spread(q, agents)),
        ProtocolName::CoinIncrement => (
            Box::new(coin_increment(q)?),
            Configuration::uniform_state(q, 0, agents)?,
        ),
    };
    Ok(Instance { protocol, initial })
}

pub fn instantiate_spec(spec: &ExperimentSpec) -> CliResult<Instance> {
    instantiate(spec.protocol, spec.states, spec.table_seed, spec.agents)
}
