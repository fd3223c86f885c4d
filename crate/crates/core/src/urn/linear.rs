use super::{check_state, Urn};
use crate::protocol::renaming_permutation;
use crate::{Configuration, Error, Result, RngStream, State};

/// Count vector searched linearly.
///
/// With renaming enabled the scan visits states by decreasing population,
/// refreshed every `max(q·⌈log₂ q⌉, 1024)` updates.
#[derive(Clone, Debug)]
pub struct LinearUrn {
    counts: Vec<u64>,
    total: u64,
    order: Vec<State>,
    renaming: bool,
    updates: u64,
    refresh_every: u64,
}

impl LinearUrn {
    pub fn new(config: &Configuration) -> Self {
        Self::with_renaming(config, false)
    }

    pub fn with_renaming(config: &Configuration, renaming: bool) -> Self {
        let q = config.num_states() as u64;
        let log_q = 64 - q.saturating_sub(1).leading_zeros() as u64;
        let mut urn = LinearUrn {
            counts: config.counts().to_vec(),
            total: config.agents(),
            order: (0..config.num_states()).collect(),
            renaming,
            updates: 0,
            refresh_every: (q * log_q).max(1024),
        };
        if renaming {
            urn.order = renaming_permutation(config.counts());
        }
        urn
    }

    /// Current scan order.
    pub fn order(&self) -> &[State] {
        &self.order
    }

    #[inline]
    fn locate(&self, mut x: u64) -> State {
        for &s in &self.order {
            let c = self.counts[s];
            if x < c {
                return s;
            }
            x -= c;
        }
        unreachable!("sample index beyond urn total")
    }

    #[inline]
    fn touched(&mut self) {
        if self.renaming {
            self.updates += 1;
            if self.updates >= self.refresh_every {
                self.updates = 0;
                self.order = renaming_permutation(&self.counts);
            }
        }
    }
}

impl Urn for LinearUrn {
    fn num_states(&self) -> usize {
        self.counts.len()
    }

    fn total(&self) -> u64 {
        self.total
    }

    fn count(&self, state: State) -> u64 {
        self.counts[state]
    }

    fn sample_with_replacement(&self, rng: &mut RngStream) -> Result<State> {
        if self.total == 0 {
            return Err(Error::EmptyUrn);
        }
        Ok(self.locate(rng.below(self.total)))
    }

    fn sample_without_replacement(&mut self, rng: &mut RngStream) -> Result<State> {
        if self.total == 0 {
            return Err(Error::EmptyUrn);
        }
        let s = self.locate(rng.below(self.total));
        self.counts[s] -= 1;
        self.total -= 1;
        self.touched();
        Ok(s)
    }

    fn add(&mut self, state: State, count: u64) {
        self.counts[state] += count;
        self.total += count;
        self.touched();
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
        self.counts[state] -= count;
        self.total -= count;
        self.touched();
        Ok(())
    }
}
