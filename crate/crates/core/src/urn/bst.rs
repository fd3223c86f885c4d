use super::{check_state, Urn};
use crate::{Configuration, Error, Result, RngStream, State};

/// Implicit complete binary tree over the state counters.
///
/// Node `i ≥ 1` stores the number of agents in its left subtree; its children
/// are `2i` and `2i + 1`. Leaves `width..2·width` correspond to states.
#[derive(Clone, Debug)]
pub struct BstUrn {
    left: Vec<u64>,
    counts: Vec<u64>,
    width: usize,
    total: u64,
}

impl BstUrn {
    pub fn new(config: &Configuration) -> Self {
        let q = config.num_states();
        let width = q.next_power_of_two().max(1);
        let mut urn = BstUrn {
            left: vec![0; width],
            counts: vec![0; q],
            width,
            total: 0,
        };
        for (s, &c) in config.counts().iter().enumerate() {
            urn.add(s, c);
        }
        urn
    }

    #[inline]
    fn locate(&self, mut x: u64) -> State {
        let mut node = 1;
        while node < self.width {
            let l = self.left[node];
            let right = (x >= l) as usize;
            x -= l * right as u64;
            node = 2 * node + right;
        }
        node - self.width
    }

    #[inline]
    fn bump(&mut self, state: State, delta: u64, increase: bool) {
        let mut node = self.width + state;
        while node > 1 {
            let parent = node >> 1;
            if node & 1 == 0 {
                if increase {
                    self.left[parent] += delta;
                } else {
                    self.left[parent] -= delta;
                }
            }
            node = parent;
        }
    }
}

impl Urn for BstUrn {
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
        self.bump(s, 1, false);
        Ok(s)
    }

    fn add(&mut self, state: State, count: u64) {
        self.counts[state] += count;
        self.total += count;
        self.bump(state, count, true);
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
        self.bump(state, count, false);
        Ok(())
    }
}
