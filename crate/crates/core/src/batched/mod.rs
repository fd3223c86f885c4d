//! Batched simulation of collision-free runs.
//!
//! A run of `ℓ` distinct agents forms `⌊ℓ/2⌋` independent interactions that
//! can be sampled together as an interaction matrix; the first repeated agent
//! is then planted explicitly. [`Batched`] processes one run per step,
//! [`MultiBatched`] keeps run interactions pending across several runs of an
//! epoch and resolves them in a single matrix at the end.

mod controller;
mod matrix;
mod pool;

pub use controller::EpochController;

use matrix::MatrixSampler;
use pool::Pool;

use crate::protocol::{renaming_permutation, Protocol};
use crate::variates::{sample_run_length, CollParams};
use crate::{Configuration, Error, Result, RngStream, State};

/// Optional speed-ups; none of them changes the simulated distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Heuristics {
    /// Visit states by decreasing population.
    pub renaming: bool,
    /// Coalesce responders with equal initiator output (one-way protocols).
    pub partitioning: bool,
    /// Coalesce configuration-preserving transitions.
    pub skipping: bool,
    /// Tune the epoch length online.
    pub controller: bool,
}

impl Heuristics {
    pub const NONE: Heuristics = Heuristics {
        renaming: false,
        partitioning: false,
        skipping: false,
        controller: false,
    };

    pub const ALL: Heuristics = Heuristics {
        renaming: true,
        partitioning: true,
        skipping: true,
        controller: true,
    };
}

impl Default for Heuristics {
    fn default() -> Self {
        Heuristics::ALL
    }
}

/// When a MultiBatched epoch stops adding runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpochPolicy {
    /// Stop once the epoch covers at least this many interactions.
    TargetLength(u64),
    /// Stop after exactly this many runs.
    Runs(u64),
}

/// Counters of one epoch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EpochStats {
    pub runs: u64,
    /// Agents drawn by the runs, `Σ ℓ`.
    pub agents: u64,
    pub interactions: u64,
}

fn check_input<P: Protocol + ?Sized>(protocol: &P, initial: &Configuration) -> Result<u64> {
    if initial.num_states() != protocol.num_states() {
        return Err(Error::StateCountMismatch {
            expected: protocol.num_states(),
            actual: initial.num_states(),
        });
    }
    let n = initial.agents();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "batched simulation needs at least two agents".into(),
        ));
    }
    Ok(n)
}

fn ceil_log2(n: u64) -> u64 {
    64 - n.saturating_sub(1).leading_zeros() as u64
}

/// One collision-free run per step.
pub struct Batched<'p, P: Protocol + ?Sized> {
    protocol: &'p P,
    c: Pool,
    cp: Pool,
    n: u64,
    order: Vec<State>,
    renaming: bool,
    sampler: MatrixSampler,
    runs: u64,
}

impl<'p, P: Protocol + ?Sized> Batched<'p, P> {
    pub fn new(protocol: &'p P, initial: &Configuration, heuristics: &Heuristics) -> Result<Self> {
        let n = check_input(protocol, initial)?;
        let q = protocol.num_states();
        Ok(Batched {
            protocol,
            c: Pool::new(initial.counts().to_vec()),
            cp: Pool::empty(q),
            n,
            order: (0..q).collect(),
            renaming: heuristics.renaming,
            sampler: MatrixSampler::new(protocol, heuristics),
            runs: 0,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.c.counts
    }

    /// Work units spent so far: run-length samples weighted by `⌈log₂ n⌉`
    /// plus hypergeometric draws.
    pub fn work(&self) -> u64 {
        self.runs * ceil_log2(self.n) + self.sampler.draws
    }

    /// Simulates one run and its collision, or exactly `budget` interactions
    /// if the run is at least that long. Returns the interactions simulated.
    pub fn step(&mut self, budget: u64, rng: &mut RngStream) -> Result<u64> {
        if budget == 0 {
            return Ok(0);
        }
        if self.renaming {
            self.order = renaming_permutation(&self.c.counts);
        }
        let len = sample_run_length(&CollParams::ordered_pairs(self.n, 0)?, rng);
        self.runs += 1;
        let half = len / 2;
        if half >= budget {
            self.sampler.sample_apply(
                &mut self.c,
                budget,
                &self.order,
                self.protocol,
                &mut self.cp,
                rng,
            )?;
            self.cp.drain_into(&mut self.c);
            return Ok(budget);
        }
        self.sampler.sample_apply(
            &mut self.c,
            half,
            &self.order,
            self.protocol,
            &mut self.cp,
            rng,
        )?;
        let (a, b) = if len.is_multiple_of(2) {
            let a = self.cp.sample_remove(&self.order, rng);
            self.cp.drain_into(&mut self.c);
            let b = self.c.sample_remove(&self.order, rng);
            (a, b)
        } else {
            let a = self.c.sample_remove(&self.order, rng);
            let b = self.cp.sample_remove(&self.order, rng);
            self.cp.drain_into(&mut self.c);
            (a, b)
        };
        let (x, y) = self.protocol.apply(a, b, rng);
        self.c.add(x, 1);
        self.c.add(y, 1);
        Ok(half + 1)
    }
}

/// Several runs per epoch with lazily evaluated interactions.
///
/// During an epoch `C` holds untouched agents and `T` delayed agents (paired
/// but not yet interacted), `C′` holds agents whose state is up to date.
/// Delayed agents are exchangeable with untouched ones, so only their number
/// is stored; one is materialized when a collision hits it.
pub struct MultiBatched<'p, P: Protocol + ?Sized> {
    protocol: &'p P,
    c: Pool,
    cp: Pool,
    delayed: u64,
    n: u64,
    order: Vec<State>,
    renaming: bool,
    sampler: MatrixSampler,
    runs: u64,
}

impl<'p, P: Protocol + ?Sized> MultiBatched<'p, P> {
    pub fn new(protocol: &'p P, initial: &Configuration, heuristics: &Heuristics) -> Result<Self> {
        let n = check_input(protocol, initial)?;
        let q = protocol.num_states();
        Ok(MultiBatched {
            protocol,
            c: Pool::new(initial.counts().to_vec()),
            cp: Pool::empty(q),
            delayed: 0,
            n,
            order: (0..q).collect(),
            renaming: heuristics.renaming,
            sampler: MatrixSampler::new(protocol, heuristics),
            runs: 0,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.c.counts
    }

    /// Work units spent so far, as for [`Batched::work`].
    pub fn work(&self) -> u64 {
        self.runs * ceil_log2(self.n) + self.sampler.draws
    }

    /// Runs one epoch, simulating at most `budget` interactions.
    pub fn epoch(
        &mut self,
        policy: EpochPolicy,
        budget: u64,
        rng: &mut RngStream,
    ) -> Result<EpochStats> {
        let mut stats = EpochStats::default();
        if budget == 0 {
            return Ok(stats);
        }
        if self.renaming {
            self.order = renaming_permutation(&self.c.counts);
        }
        loop {
            let seen = self.cp.total + self.delayed;
            let len = sample_run_length(&CollParams::ordered_pairs(self.n, seen)?, rng);
            self.runs += 1;
            stats.runs += 1;
            stats.agents += len;
            let half = len / 2;
            let left = budget - stats.interactions;
            if half >= left {
                self.delayed += 2 * left;
                stats.interactions = budget;
                break;
            }
            self.delayed += 2 * half;
            let (a, b) = if len.is_multiple_of(2) {
                let a = self.draw_seen(rng);
                let b = self.draw_other(rng);
                (a, b)
            } else {
                let a = self.c.sample_remove(&self.order, rng);
                let b = self.draw_seen(rng);
                (a, b)
            };
            let (x, y) = self.protocol.apply(a, b, rng);
            self.cp.add(x, 1);
            self.cp.add(y, 1);
            stats.interactions += half + 1;
            let done = match policy {
                EpochPolicy::TargetLength(target) => stats.interactions >= target,
                EpochPolicy::Runs(runs) => stats.runs >= runs,
            };
            if done || stats.interactions >= budget {
                break;
            }
        }
        let pairs = self.delayed / 2;
        self.sampler.sample_apply(
            &mut self.c,
            pairs,
            &self.order,
            self.protocol,
            &mut self.cp,
            rng,
        )?;
        self.delayed = 0;
        self.cp.drain_into(&mut self.c);
        Ok(stats)
    }

    /// Removes a uniformly random seen agent, resolving it first if delayed.
    fn draw_seen(&mut self, rng: &mut RngStream) -> State {
        let u = rng.below(self.cp.total + self.delayed);
        if u < self.delayed {
            self.materialize(rng)
        } else {
            self.cp.sample_remove(&self.order, rng)
        }
    }

    /// Removes a uniformly random agent from everyone still in an urn.
    fn draw_other(&mut self, rng: &mut RngStream) -> State {
        let u = rng.below(self.c.total + self.cp.total);
        if u < self.delayed {
            self.materialize(rng)
        } else if u < self.c.total {
            self.c.sample_remove(&self.order, rng)
        } else {
            self.cp.sample_remove(&self.order, rng)
        }
    }

    /// Picks a delayed agent and its partner, evaluates their pending
    /// interaction, moves the partner to `C′` and returns the agent's new state.
    fn materialize(&mut self, rng: &mut RngStream) -> State {
        let x = self.c.sample_remove(&self.order, rng);
        let y = self.c.sample_remove(&self.order, rng);
        self.delayed -= 2;
        if rng.next_u64() >> 63 == 0 {
            let (a, b) = self.protocol.apply(x, y, rng);
            self.cp.add(b, 1);
            a
        } else {
            let (a, b) = self.protocol.apply(y, x, rng);
            self.cp.add(a, 1);
            b
        }
    }
}

/// Batched simulator flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BatchMode {
    Batched,
    MultiBatched,
}

/// Totals over a whole batched run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BatchStats {
    pub epochs: u64,
    pub runs: u64,
    pub agents: u64,
    pub interactions: u64,
}

/// Options of [`run_batched`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchOptions {
    pub mode: BatchMode,
    pub heuristics: Heuristics,
    /// Fixed epoch policy; when `None` the target length starts at `√n`
    /// and is tuned if the controller heuristic is on.
    pub epoch_policy: Option<EpochPolicy>,
}

/// Simulates exactly `interactions` interactions.
///
/// `sink(t, counts)` is called at `t = 0` once setup is done, at every multiple of
/// `snapshot_every` and at `t = interactions`; runs that would cross a
/// snapshot time are cut there, so snapshots are exact.
pub fn run_batched<P: Protocol + ?Sized>(
    protocol: &P,
    initial: &Configuration,
    interactions: u64,
    snapshot_every: u64,
    options: &BatchOptions,
    rng: &mut RngStream,
    sink: &mut dyn FnMut(u64, &[u64]),
) -> Result<(Configuration, BatchStats)> {
    if snapshot_every == 0 {
        return Err(Error::InvalidParameter(
            "snapshot interval must be positive".into(),
        ));
    }
    if interactions == 0 {
        if initial.num_states() != protocol.num_states() {
            return Err(Error::StateCountMismatch {
                expected: protocol.num_states(),
                actual: initial.num_states(),
            });
        }
        sink(0, initial.counts());
        return Ok((initial.clone(), BatchStats::default()));
    }
    let mut stats = BatchStats::default();
    let mut t = 0u64;
    match options.mode {
        BatchMode::Batched => {
            let mut sim = Batched::new(protocol, initial, &options.heuristics)?;
            sink(0, initial.counts());
            while t < interactions {
                let stop = next_stop(t, snapshot_every, interactions);
                while t < stop {
                    t += sim.step(stop - t, rng)?;
                    stats.runs += 1;
                    stats.epochs += 1;
                }
                sink(t, sim.counts());
            }
            stats.interactions = t;
            Ok((Configuration::new(sim.counts().to_vec()), stats))
        }
        BatchMode::MultiBatched => {
            let mut sim = MultiBatched::new(protocol, initial, &options.heuristics)?;
            sink(0, initial.counts());
            let start = (initial.agents() as f64).sqrt().ceil() as u64;
            let mut controller = (options.heuristics.controller && options.epoch_policy.is_none())
                .then(|| EpochController::new(start as f64));
            while t < interactions {
                let stop = next_stop(t, snapshot_every, interactions);
                while t < stop {
                    let policy = match (options.epoch_policy, &controller) {
                        (Some(p), _) => p,
                        (None, Some(c)) => EpochPolicy::TargetLength(c.target()),
                        (None, None) => EpochPolicy::TargetLength(start),
                    };
                    let before = sim.work();
                    let e = sim.epoch(policy, stop - t, rng)?;
                    if let Some(c) = controller.as_mut() {
                        let spent = (sim.work() - before).max(1);
                        c.record(e.interactions as f64 / spent as f64);
                    }
                    t += e.interactions;
                    stats.epochs += 1;
                    stats.runs += e.runs;
                    stats.agents += e.agents;
                }
                sink(t, sim.counts());
            }
            stats.interactions = t;
            Ok((Configuration::new(sim.counts().to_vec()), stats))
        }
    }
}

fn next_stop(t: u64, every: u64, end: u64) -> u64 {
    (t / every + 1).saturating_mul(every).min(end)
}

#[cfg(test)]
mod tests;
