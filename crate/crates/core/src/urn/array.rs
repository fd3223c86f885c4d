use super::{check_state, Urn};
use crate::{Configuration, Error, Result, RngStream, State};

/// One 32-bit state word per agent; removal swaps with the last agent.
#[derive(Clone, Debug)]
pub struct ArrayUrn {
    agents: Vec<u32>,
    counts: Vec<u64>,
}

impl ArrayUrn {
    pub fn new(config: &Configuration) -> Self {
        let mut agents = Vec::with_capacity(config.agents() as usize);
        for (state, &c) in config.counts().iter().enumerate() {
            agents.extend(std::iter::repeat_n(state as u32, c as usize));
        }
        ArrayUrn {
            agents,
            counts: config.counts().to_vec(),
        }
    }

    /// Bytes held by the per-agent array.
    pub fn heap_bytes(&self) -> usize {
        self.agents.capacity() * std::mem::size_of::<u32>()
            + self.counts.capacity() * std::mem::size_of::<u64>()
    }
}

impl Urn for ArrayUrn {
    fn num_states(&self) -> usize {
        self.counts.len()
    }

    fn total(&self) -> u64 {
        self.agents.len() as u64
    }

    fn count(&self, state: State) -> u64 {
        self.counts[state]
    }

    fn sample_with_replacement(&self, rng: &mut RngStream) -> Result<State> {
        if self.agents.is_empty() {
            return Err(Error::EmptyUrn);
        }
        Ok(self.agents[rng.below(self.agents.len() as u64) as usize] as State)
    }

    fn sample_without_replacement(&mut self, rng: &mut RngStream) -> Result<State> {
        if self.agents.is_empty() {
            return Err(Error::EmptyUrn);
        }
        let i = rng.below(self.agents.len() as u64) as usize;
        let state = self.agents.swap_remove(i) as State;
        self.counts[state] -= 1;
        Ok(state)
    }

    fn add(&mut self, state: State, count: u64) {
        self.counts[state] += count;
        self.agents
            .extend(std::iter::repeat_n(state as u32, count as usize));
    }

    fn remove(&mut self, state: State, count: u64) -> Result<()> {
        check_state(state, self.counts.len())?;
        let available = self.counts[state];
        if available < count {
            return Err(Error::Underflow {
                state,
                requested: count,
                available,
            });
        }
        let mut left = count;
        let mut i = 0;
        while left > 0 {
            if self.agents[i] as State == state {
                self.agents.swap_remove(i);
                left -= 1;
            } else {
                i += 1;
            }
        }
        self.counts[state] -= count;
        Ok(())
    }
}
