use crate::{RngStream, State};

/// Count-vector urn used by the batched simulators.
#[derive(Clone, Debug)]
pub(crate) struct Pool {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Pool {
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Pool { counts, total }
    }

    pub fn empty(q: usize) -> Self {
        Pool {
            counts: vec![0; q],
            total: 0,
        }
    }

    /// Removes one agent chosen uniformly at random; the pool must be non-empty.
    #[inline]
    pub fn sample_remove(&mut self, order: &[State], rng: &mut RngStream) -> State {
        debug_assert!(self.total > 0);
        let mut x = rng.below(self.total);
        for &s in order {
            let c = self.counts[s];
            if x < c {
                self.counts[s] -= 1;
                self.total -= 1;
                return s;
            }
            x -= c;
        }
        unreachable!("pool total out of sync with counts")
    }

    #[inline]
    pub fn add(&mut self, state: State, count: u64) {
        self.counts[state] += count;
        self.total += count;
    }

    pub fn subtract(&mut self, v: &[u64]) {
        for (c, &x) in self.counts.iter_mut().zip(v) {
            *c -= x;
            self.total -= x;
        }
    }

    pub fn drain_into(&mut self, other: &mut Pool) {
        for (dst, src) in other.counts.iter_mut().zip(self.counts.iter_mut()) {
            *dst += *src;
            *src = 0;
        }
        other.total += self.total;
        self.total = 0;
    }
}
