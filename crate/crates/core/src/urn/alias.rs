use std::cell::Cell;

use super::{check_state, Urn};
use crate::{Configuration, Error, Result, RngStream, State};

/// Rebuild thresholds of a [`DynamicAliasTable`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AliasParams {
    pub alpha: f64,
    pub beta: f64,
    /// Reject configurations with `n < q²`.
    pub enforce_size_bound: bool,
}

impl Default for AliasParams {
    fn default() -> Self {
        AliasParams {
            alpha: 0.5,
            beta: 2.0,
            enforce_size_bound: true,
        }
    }
}

/// Integer alias table with one row per state and threshold-triggered rebuilds.
///
/// Row `i` holds `F[i]` marbles of color `i` and `S[i]` marbles of color
/// `A[i]`. Sampling picks a row uniformly, then `X` uniform below an upper
/// bound on the largest row weight, and rejects if `X ≥ R[i]`.
///
/// The bounds `rmin_lb ≤ min R` and `rmax_ub ≥ max R` are the extreme row
/// weights seen since the last rebuild, so checking them is O(1) per update.
#[derive(Clone, Debug)]
pub struct DynamicAliasTable {
    first: Vec<u64>,
    second: Vec<u64>,
    alias: Vec<u32>,
    colors: Vec<u64>,
    total: u64,
    rmin_lb: u64,
    rmax_ub: u64,
    params: AliasParams,
    rebuilds: u64,
    rejections: Cell<u64>,
    small: Vec<u32>,
    large: Vec<u32>,
}

impl DynamicAliasTable {
    pub fn new(config: &Configuration) -> Result<Self> {
        Self::with_params(config, AliasParams::default())
    }

    pub fn with_params(config: &Configuration, params: AliasParams) -> Result<Self> {
        let k = config.num_states();
        let n = config.agents();
        validate_params(&params, k)?;
        if params.enforce_size_bound && (k as u128) * (k as u128) > n as u128 {
            return Err(Error::AliasTooSmall {
                num_states: k,
                agents: n,
                required: (k as u64).saturating_mul(k as u64),
            });
        }
        let mut table = DynamicAliasTable {
            first: vec![0; k],
            second: vec![0; k],
            alias: (0..k as u32).collect(),
            colors: config.counts().to_vec(),
            total: n,
            rmin_lb: 0,
            rmax_ub: 0,
            params,
            rebuilds: 0,
            rejections: Cell::new(0),
            small: Vec::with_capacity(k),
            large: Vec::with_capacity(k),
        };
        table.build();
        Ok(table)
    }

    /// Adopts an explicit table layout given as `(F[i], S[i], A[i])` rows.
    pub fn from_rows(rows: &[(u64, u64, State)], params: AliasParams) -> Result<Self> {
        let k = rows.len();
        validate_params(&params, k)?;
        let mut colors = vec![0u64; k];
        for (i, &(f, s, a)) in rows.iter().enumerate() {
            check_state(a, k)?;
            colors[i] += f;
            colors[a] += s;
        }
        let weights = rows.iter().map(|&(f, s, _)| f + s);
        let table = DynamicAliasTable {
            first: rows.iter().map(|r| r.0).collect(),
            second: rows.iter().map(|r| r.1).collect(),
            alias: rows.iter().map(|r| r.2 as u32).collect(),
            total: colors.iter().sum(),
            colors,
            rmin_lb: weights.clone().min().unwrap_or(0),
            rmax_ub: weights.max().unwrap_or(0),
            params,
            rebuilds: 0,
            rejections: Cell::new(0),
            small: Vec::with_capacity(k),
            large: Vec::with_capacity(k),
        };
        Ok(table)
    }

    pub fn params(&self) -> AliasParams {
        self.params
    }

    /// Row `i` as `(F[i], S[i], A[i])`.
    pub fn row(&self, i: usize) -> (u64, u64, State) {
        (self.first[i], self.second[i], self.alias[i] as State)
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, u64, State)> + '_ {
        (0..self.first.len()).map(|i| self.row(i))
    }

    /// Number of rebuilds since construction, excluding the initial build.
    pub fn rebuild_count(&self) -> u64 {
        self.rebuilds
    }

    /// Number of rejected sampling trials since construction.
    pub fn rejection_count(&self) -> u64 {
        self.rejections.get()
    }

    pub fn row_weight_bounds(&self) -> (u64, u64) {
        (self.rmin_lb, self.rmax_ub)
    }

    fn build(&mut self) {
        let k = self.colors.len();
        let base = self.total / k as u64;
        let extra = (self.total % k as u64) as usize;
        let target = |i: usize| base + u64::from(i < extra);

        self.first.copy_from_slice(&self.colors);
        self.second.fill(0);
        for (i, a) in self.alias.iter_mut().enumerate() {
            *a = i as u32;
        }
        self.small.clear();
        self.large.clear();
        for i in 0..k {
            let w = target(i);
            if self.first[i] < w {
                self.small.push(i as u32);
            } else if self.first[i] > w {
                self.large.push(i as u32);
            }
        }
        while let Some(s) = self.small.pop() {
            let s = s as usize;
            let l = *self.large.last().expect("alias build: weight imbalance") as usize;
            let fill = target(s) - self.first[s];
            self.second[s] = fill;
            self.alias[s] = l as u32;
            self.first[l] -= fill;
            let wl = target(l);
            if self.first[l] <= wl {
                self.large.pop();
                if self.first[l] < wl {
                    self.small.push(l as u32);
                }
            }
        }
        debug_assert!(self.large.is_empty());
        self.rmin_lb = base;
        self.rmax_ub = base + u64::from(extra > 0);
    }

    #[inline]
    fn row_weight(&self, i: usize) -> u64 {
        self.first[i] + self.second[i]
    }

    #[inline]
    fn lowered(&mut self, i: usize) {
        self.rmin_lb = self.rmin_lb.min(self.row_weight(i));
    }

    #[inline]
    fn raised(&mut self, i: usize) {
        self.rmax_ub = self.rmax_ub.max(self.row_weight(i));
    }

    #[inline]
    fn rebalance(&mut self) {
        let k = self.colors.len() as u64;
        let lo = self.total / k;
        let hi = lo + u64::from(!self.total.is_multiple_of(k));
        if (self.rmin_lb as f64) < self.params.alpha * lo as f64
            || (self.rmax_ub as f64) > self.params.beta * hi as f64
        {
            self.rebuilds += 1;
            self.build();
        }
    }

    /// Returns `(row, in_alias_entry)` of a uniformly drawn marble.
    #[inline]
    fn draw(&self, rng: &mut RngStream) -> (usize, bool) {
        let k = self.first.len() as u64;
        let bound = self.rmax_ub;
        loop {
            let i = rng.below(k) as usize;
            let x = rng.below(bound);
            let f = self.first[i];
            if x < f {
                return (i, false);
            }
            if x < f + self.second[i] {
                return (i, true);
            }
            self.rejections.set(self.rejections.get() + 1);
        }
    }
}

fn validate_params(params: &AliasParams, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "alias table needs at least one state".into(),
        ));
    }
    if k > u32::MAX as usize {
        return Err(Error::InvalidParameter(
            "too many states for alias table".into(),
        ));
    }
    if !(params.alpha > 0.0 && params.alpha < 1.0 && params.beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alias thresholds need 0 < alpha < 1 < beta, got alpha={} beta={}",
            params.alpha, params.beta
        )));
    }
    Ok(())
}

impl Urn for DynamicAliasTable {
    fn num_states(&self) -> usize {
        self.colors.len()
    }

    fn total(&self) -> u64 {
        self.total
    }

    fn count(&self, state: State) -> u64 {
        self.colors[state]
    }

    fn sample_with_replacement(&self, rng: &mut RngStream) -> Result<State> {
        if self.total == 0 {
            return Err(Error::EmptyUrn);
        }
        let (i, second) = self.draw(rng);
        Ok(if second { self.alias[i] as State } else { i })
    }

    fn sample_without_replacement(&mut self, rng: &mut RngStream) -> Result<State> {
        if self.total == 0 {
            return Err(Error::EmptyUrn);
        }
        let (i, second) = self.draw(rng);
        let state = if second {
            self.second[i] -= 1;
            self.alias[i] as State
        } else {
            self.first[i] -= 1;
            i
        };
        self.colors[state] -= 1;
        self.total -= 1;
        self.lowered(i);
        self.rebalance();
        Ok(state)
    }

    fn add(&mut self, state: State, count: u64) {
        if count == 0 {
            return;
        }
        self.first[state] += count;
        self.colors[state] += count;
        self.total += count;
        self.raised(state);
        self.rebalance();
    }

    fn remove(&mut self, state: State, count: u64) -> Result<()> {
        check_state(state, self.colors.len())?;
        let available = self.colors[state];
        if available < count {
            return Err(Error::Underflow {
                state,
                requested: count,
                available,
            });
        }
        if count == 0 {
            return Ok(());
        }
        let own = self.first[state].min(count);
        self.first[state] -= own;
        self.lowered(state);
        let mut left = count - own;
        let mut i = 0;
        while left > 0 {
            if self.alias[i] as State == state && self.second[i] > 0 {
                let take = self.second[i].min(left);
                self.second[i] -= take;
                left -= take;
                self.lowered(i);
            }
            i += 1;
        }
        self.colors[state] -= count;
        self.total -= count;
        self.rebalance();
        Ok(())
    }
}
