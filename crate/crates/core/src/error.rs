use thiserror::Error;

use crate::State;

/// Errors raised by urns, samplers, protocols and simulators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot sample from an empty urn")]
    EmptyUrn,

    #[error("state {state} out of range for {num_states} states")]
    StateOutOfRange { state: State, num_states: usize },

    #[error("cannot remove {requested} agents of state {state}: only {available} present")]
    Underflow {
        state: State,
        requested: u64,
        available: u64,
    },

    #[error("alias table over {num_states} states needs at least {required} agents, got {agents}")]
    AliasTooSmall {
        num_states: usize,
        agents: u64,
        required: u64,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameter(String),

    #[error("partitioning requires a one-way protocol; use the skip set for two-way tables")]
    NotOneWay,

    #[error("protocol assigned {assigned} agents for a batch of {num} interactions (expected {expected})")]
    BatchContract {
        num: u64,
        assigned: u64,
        expected: u64,
    },

    #[error("reachable configuration space exceeds the oracle bound of {limit}")]
    StateSpaceTooLarge { limit: usize },

    #[error("configuration has {actual} states, protocol expects {expected}")]
    StateCountMismatch { expected: usize, actual: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
