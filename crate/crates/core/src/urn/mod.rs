//! Urns: multisets of agent states supporting uniform sampling of agents.
//!
//! Four interchangeable backends are provided. They differ only in how the
//! multiset is stored and therefore in time and memory per operation:
//!
//! | backend | storage | sample |
//! |---------|---------|--------|
//! | [`ArrayUrn`] | one word per agent | O(1) |
//! | [`LinearUrn`] | one counter per state | O(q) |
//! | [`BstUrn`] | implicit binary tree of counters | O(log q) |
//! | [`DynamicAliasTable`] | integer alias table | O(1) expected, amortized |

mod alias;
mod array;
mod bst;
mod linear;

pub use alias::{AliasParams, DynamicAliasTable};
pub use array::ArrayUrn;
pub use bst::BstUrn;
pub use linear::LinearUrn;

use std::fmt;
use std::str::FromStr;

use crate::{Configuration, Error, Result, RngStream, State};

/// Uniform sampling container over a multiset of states.
///
/// `add` panics if `state` is out of range; every other operation reports
/// misuse through [`Error`].
pub trait Urn {
    fn num_states(&self) -> usize;

    fn total(&self) -> u64;

    fn count(&self, state: State) -> u64;

    /// Draws an agent uniformly at random and leaves the urn unchanged.
    fn sample_with_replacement(&self, rng: &mut RngStream) -> Result<State>;

    /// Draws an agent uniformly at random and removes it.
    fn sample_without_replacement(&mut self, rng: &mut RngStream) -> Result<State>;

    fn add(&mut self, state: State, count: u64);

    fn remove(&mut self, state: State, count: u64) -> Result<()>;

    fn configuration(&self) -> Configuration {
        Configuration::new((0..self.num_states()).map(|s| self.count(s)).collect())
    }
}

/// Storage strategy for a sequential simulator's urn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UrnBackend {
    Array,
    Linear,
    Bst,
    Alias,
}

impl UrnBackend {
    pub const ALL: [UrnBackend; 4] = [
        UrnBackend::Array,
        UrnBackend::Linear,
        UrnBackend::Bst,
        UrnBackend::Alias,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UrnBackend::Array => "array",
            UrnBackend::Linear => "linear",
            UrnBackend::Bst => "bst",
            UrnBackend::Alias => "alias",
        }
    }
}

impl fmt::Display for UrnBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UrnBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        UrnBackend::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown urn backend `{s}`")))
    }
}

/// Any backend behind one type, for callers that pick the backend at runtime.
#[derive(Clone, Debug)]
pub enum AnyUrn {
    Array(ArrayUrn),
    Linear(LinearUrn),
    Bst(BstUrn),
    Alias(DynamicAliasTable),
}

/// Builds an urn holding `config` with the requested backend.
///
/// The alias backend requires `q² ≤ n`.
pub fn urn_new(config: &Configuration, backend: UrnBackend) -> Result<AnyUrn> {
    Ok(match backend {
        UrnBackend::Array => AnyUrn::Array(ArrayUrn::new(config)),
        UrnBackend::Linear => AnyUrn::Linear(LinearUrn::new(config)),
        UrnBackend::Bst => AnyUrn::Bst(BstUrn::new(config)),
        UrnBackend::Alias => AnyUrn::Alias(DynamicAliasTable::new(config)?),
    })
}

macro_rules! dispatch {
    ($self:expr, $u:ident => $body:expr) => {
        match $self {
            AnyUrn::Array($u) => $body,
            AnyUrn::Linear($u) => $body,
            AnyUrn::Bst($u) => $body,
            AnyUrn::Alias($u) => $body,
        }
    };
}

impl Urn for AnyUrn {
    fn num_states(&self) -> usize {
        dispatch!(self, u => u.num_states())
    }

    fn total(&self) -> u64 {
        dispatch!(self, u => u.total())
    }

    fn count(&self, state: State) -> u64 {
        dispatch!(self, u => u.count(state))
    }

    fn sample_with_replacement(&self, rng: &mut RngStream) -> Result<State> {
        dispatch!(self, u => u.sample_with_replacement(rng))
    }

    fn sample_without_replacement(&mut self, rng: &mut RngStream) -> Result<State> {
        dispatch!(self, u => u.sample_without_replacement(rng))
    }

    fn add(&mut self, state: State, count: u64) {
        dispatch!(self, u => u.add(state, count))
    }

    fn remove(&mut self, state: State, count: u64) -> Result<()> {
        dispatch!(self, u => u.remove(state, count))
    }
}

fn check_state(state: State, num_states: usize) -> Result<()> {
    if state < num_states {
        Ok(())
    } else {
        Err(Error::StateOutOfRange { state, num_states })
    }
}
