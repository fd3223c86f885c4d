use std::fmt;

use crate::{Error, Result, State};

/// Multiset of agent states stored as a dense count vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    counts: Vec<u64>,
}

impl Configuration {
    pub fn new(counts: Vec<u64>) -> Self {
        Configuration { counts }
    }

    /// `num_states` empty states.
    pub fn empty(num_states: usize) -> Self {
        Configuration {
            counts: vec![0; num_states],
        }
    }

    /// All `n` agents in `state`.
    pub fn uniform_state(num_states: usize, state: State, n: u64) -> Result<Self> {
        if state >= num_states {
            return Err(Error::StateOutOfRange { state, num_states });
        }
        let mut c = Configuration::empty(num_states);
        c.counts[state] = n;
        Ok(c)
    }

    /// `n` agents spread as evenly as possible; the first `n mod q` states get one extra.
    pub fn spread(num_states: usize, n: u64) -> Self {
        let q = num_states as u64;
        let counts = (0..q).map(|i| n / q + u64::from(i < n % q)).collect();
        Configuration { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn counts_mut(&mut self) -> &mut [u64] {
        &mut self.counts
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.counts
    }

    pub fn num_states(&self) -> usize {
        self.counts.len()
    }

    pub fn agents(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, state: State) -> u64 {
        self.counts[state]
    }
}

impl From<Vec<u64>> for Configuration {
    fn from(counts: Vec<u64>) -> Self {
        Configuration { counts }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "q{i}:{c}")?;
        }
        write!(f, ")")
    }
}
