//! Exact small-instance references and statistical comparisons.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::protocol::Protocol;
use crate::{Configuration, Error, Result};

/// Largest number of configurations `exact_distribution` keeps at once.
pub const STATE_SPACE_LIMIT: usize = 100_000;

/// Probability distribution over configurations, keyed by count tuple.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigDistribution {
    mass: BTreeMap<Vec<u64>, f64>,
}

impl ConfigDistribution {
    pub fn point(config: &Configuration) -> Self {
        let mut mass = BTreeMap::new();
        mass.insert(config.counts().to_vec(), 1.0);
        ConfigDistribution { mass }
    }

    /// Normalized histogram of observed configurations.
    pub fn empirical(observed: &BTreeMap<Vec<u64>, u64>) -> Self {
        let total: u64 = observed.values().sum();
        let mass = observed
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / total as f64))
            .collect();
        ConfigDistribution { mass }
    }

    pub fn probability(&self, counts: &[u64]) -> f64 {
        self.mass.get(counts).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u64], f64)> {
        self.mass.iter().map(|(k, &p)| (k.as_slice(), p))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    fn add(&mut self, counts: Vec<u64>, p: f64) {
        *self.mass.entry(counts).or_insert(0.0) += p;
    }
}

/// Distribution of the configuration after `horizon` interactions of
/// uniformly random ordered pairs of distinct agents.
pub fn exact_distribution(
    protocol: &dyn Protocol,
    initial: &Configuration,
    horizon: u64,
) -> Result<ConfigDistribution> {
    let q = protocol.num_states();
    if initial.num_states() != q {
        return Err(Error::StateCountMismatch {
            expected: q,
            actual: initial.num_states(),
        });
    }
    let n = initial.agents();
    let mut current = ConfigDistribution::point(initial);
    if horizon == 0 {
        return Ok(current);
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "interactions need at least two agents".into(),
        ));
    }
    let mut outcomes = vec![Vec::new(); q * q];
    for u in 0..q {
        for v in 0..q {
            outcomes[u * q + v] = protocol.outcome_distribution(u, v).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "protocol `{}` has no exact outcome law",
                    protocol.name()
                ))
            })?;
        }
    }
    let pairs = (n * (n - 1)) as f64;
    for _ in 0..horizon {
        let mut next = ConfigDistribution::default();
        for (counts, p) in current.mass {
            for u in 0..q {
                for v in 0..q {
                    let ways = counts[u] * (counts[v] - u64::from(u == v).min(counts[v]));
                    if ways == 0 {
                        continue;
                    }
                    let w = p * ways as f64 / pairs;
                    for &((a, b), pr) in &outcomes[u * q + v] {
                        let mut succ = counts.clone();
                        succ[u] -= 1;
                        succ[v] -= 1;
                        succ[a] += 1;
                        succ[b] += 1;
                        next.add(succ, w * pr);
                    }
                }
            }
            if next.len() > STATE_SPACE_LIMIT {
                return Err(Error::StateSpaceTooLarge {
                    limit: STATE_SPACE_LIMIT,
                });
            }
        }
        current = next;
    }
    Ok(current)
}

/// `½·Σ|a − b|` over the union of supports.
pub fn total_variation(a: &ConfigDistribution, b: &ConfigDistribution) -> f64 {
    let mut sum = 0.0;
    for (k, &p) in &a.mass {
        sum += (p - b.probability(k)).abs();
    }
    for (k, &p) in &b.mass {
        if !a.mass.contains_key(k) {
            sum += p;
        }
    }
    0.5 * sum
}

/// Pearson goodness-of-fit p-value of `observed` against `expected`
/// probabilities for `total` trials.
///
/// Bins whose expected count is below 5 are pooled into one bin (which is
/// merged into the smallest other bin if it is still below 5). An observation
/// in a bin of zero probability gives `p = 0`; a single bin gives `p = 1`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], total: u64) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::StateCountMismatch {
            expected: expected.len(),
            actual: observed.len(),
        });
    }
    let total_f = total as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            if o > 0 {
                return Ok(0.0);
            }
            continue;
        }
        let e = p * total_f;
        if e < 5.0 {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 {
        if pooled.1 >= 5.0 || bins.is_empty() {
            bins.push(pooled);
        } else {
            let smallest = bins
                .iter_mut()
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty");
            smallest.0 += pooled.0;
            smallest.1 += pooled.1;
        }
    }
    if bins.len() < 2 {
        return Ok(1.0);
    }
    let stat: f64 = bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dist = ChiSquared::new((bins.len() - 1) as f64)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(dist.sf(stat))
}

/// [`chi_square_gof`] for a histogram of configurations.
pub fn chi_square_configs(
    observed: &BTreeMap<Vec<u64>, u64>,
    expected: &ConfigDistribution,
) -> Result<f64> {
    let total: u64 = observed.values().sum();
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    for (k, p) in expected.iter() {
        obs.push(observed.get(k).copied().unwrap_or(0));
        exp.push(p);
    }
    for (k, &c) in observed {
        if !expected.mass.contains_key(k) {
            obs.push(c);
            exp.push(0.0);
        }
    }
    chi_square_gof(&obs, &exp, total)
}
