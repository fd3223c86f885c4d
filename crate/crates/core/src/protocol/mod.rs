//! Protocol interface, transition tables and the built-in protocols.

mod builtin;
mod table;

pub use builtin::{
    coin_increment, identity, leader_election, phase_clock, random_two_way, running_clock_initial,
    swap, CoinIncrement, FOLLOWER, LEADER,
};
pub use table::{Group, RowPartition, SkipSet, TableProtocol, TransitionTable};

use crate::{Error, Result, RngStream, State};

/// A population protocol: a transition function on ordered state pairs.
///
/// Deterministic protocols expose their [`TransitionTable`]; the simulators
/// use it for the partitioning and skipping heuristics.
pub trait Protocol: Send + Sync {
    fn name(&self) -> &str;

    fn num_states(&self) -> usize;

    /// Whether the responder never changes state.
    fn is_one_way(&self) -> bool {
        self.table().is_some_and(TransitionTable::is_one_way)
    }

    fn table(&self) -> Option<&TransitionTable> {
        None
    }

    /// Successor `(initiator, responder)` states. Inputs must be in range.
    fn apply(&self, initiator: State, responder: State, rng: &mut RngStream) -> (State, State);

    /// Applies `num` independent interactions of the pair and reports the
    /// resulting `2·num` agents through `assign(state, count)`.
    fn batch_apply(
        &self,
        initiator: State,
        responder: State,
        num: u64,
        rng: &mut RngStream,
        assign: &mut dyn FnMut(State, u64),
    ) {
        if let Some(table) = self.table() {
            let (a, b) = table.get(initiator, responder);
            assign(a, num);
            assign(b, num);
        } else {
            for _ in 0..num {
                let (a, b) = self.apply(initiator, responder, rng);
                assign(a, 1);
                assign(b, 1);
            }
        }
    }

    /// Exact outcome law of one interaction, if the protocol can state it.
    fn outcome_distribution(
        &self,
        initiator: State,
        responder: State,
    ) -> Option<Vec<((State, State), f64)>> {
        self.table()
            .map(|t| vec![(t.get(initiator, responder), 1.0)])
    }
}

/// [`Protocol::apply`] with range checks on inputs and outputs.
pub fn checked_apply<P: Protocol + ?Sized>(
    protocol: &P,
    initiator: State,
    responder: State,
    rng: &mut RngStream,
) -> Result<(State, State)> {
    let q = protocol.num_states();
    for s in [initiator, responder] {
        if s >= q {
            return Err(Error::StateOutOfRange {
                state: s,
                num_states: q,
            });
        }
    }
    let (a, b) = protocol.apply(initiator, responder, rng);
    for s in [a, b] {
        if s >= q {
            return Err(Error::StateOutOfRange {
                state: s,
                num_states: q,
            });
        }
    }
    Ok((a, b))
}

/// [`Protocol::batch_apply`] that verifies the protocol assigned exactly
/// `2·num` agents, all to valid states.
pub fn checked_batch_apply<P: Protocol + ?Sized>(
    protocol: &P,
    initiator: State,
    responder: State,
    num: u64,
    rng: &mut RngStream,
    assign: &mut dyn FnMut(State, u64),
) -> Result<()> {
    let q = protocol.num_states();
    let mut assigned = 0u64;
    let mut bad = None;
    protocol.batch_apply(initiator, responder, num, rng, &mut |s, c| {
        if s >= q {
            bad.get_or_insert(s);
            return;
        }
        assigned += c;
        assign(s, c);
    });
    if let Some(state) = bad {
        return Err(Error::StateOutOfRange {
            state,
            num_states: q,
        });
    }
    if assigned != 2 * num {
        return Err(Error::BatchContract {
            num,
            assigned,
            expected: 2 * num,
        });
    }
    Ok(())
}

/// States ordered by decreasing count, ties by increasing id.
pub fn renaming_permutation(counts: &[u64]) -> Vec<State> {
    let mut pi: Vec<State> = (0..counts.len()).collect();
    pi.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    pi
}

#[cfg(test)]
mod tests;
