use super::pool::Pool;
use super::Heuristics;
use crate::protocol::{checked_batch_apply, Protocol, RowPartition, SkipSet};
use crate::variates::hypergeometric_unchecked as hyper;
use crate::variates::multivariate_hypergeometric_into;
use crate::{Error, Result, RngStream, State};

enum RowMode {
    Plain,
    Partition(RowPartition),
    Skip {
        skips: SkipSet,
        members: Vec<Vec<State>>,
    },
}

/// Samples and applies the interactions of `half_len` disjoint agent pairs.
///
/// Initiator counts `D` and responder counts `E` are multivariate
/// hypergeometric draws from the pool; each initiator row then takes its
/// responders from `E` without replacement. With partitioning or skipping a
/// row first draws coalesced categories, then splits them per state.
pub(crate) struct MatrixSampler {
    mode: RowMode,
    rows: Vec<u64>,
    resp: Vec<u64>,
    pub draws: u64,
}

impl MatrixSampler {
    pub fn new<P: Protocol + ?Sized>(protocol: &P, heuristics: &Heuristics) -> Self {
        let q = protocol.num_states();
        let mode = match protocol.table() {
            Some(t) if heuristics.partitioning && t.is_one_way() => {
                RowMode::Partition(t.build_partition().expect("one-way table"))
            }
            Some(t) if heuristics.skipping => {
                let skips = t.detect_skips();
                let members = (0..q)
                    .map(|i| (0..q).filter(|&j| skips.contains(i, j)).collect())
                    .collect();
                RowMode::Skip { skips, members }
            }
            _ => RowMode::Plain,
        };
        MatrixSampler {
            mode,
            rows: vec![0; q],
            resp: vec![0; q],
            draws: 0,
        }
    }

    pub fn sample_apply<P: Protocol + ?Sized>(
        &mut self,
        c: &mut Pool,
        half_len: u64,
        order: &[State],
        protocol: &P,
        out: &mut Pool,
        rng: &mut RngStream,
    ) -> Result<()> {
        if half_len == 0 {
            return Ok(());
        }
        if half_len.saturating_mul(2) > c.total {
            return Err(Error::InvalidParameter(format!(
                "{half_len} pairs need more than the {} available agents",
                c.total
            )));
        }
        multivariate_hypergeometric_into(&c.counts, half_len, order, &mut self.rows, rng)?;
        c.subtract(&self.rows);
        multivariate_hypergeometric_into(&c.counts, half_len, order, &mut self.resp, rng)?;
        c.subtract(&self.resp);
        self.draws += 2 * order.len() as u64;

        let mut pool = half_len;
        for &i in order {
            let k = self.rows[i];
            if k == 0 {
                continue;
            }
            let last = k == pool;
            match &self.mode {
                RowMode::Plain => {
                    plain_row(
                        i,
                        k,
                        pool,
                        last,
                        order,
                        &mut self.resp,
                        &mut self.draws,
                        protocol,
                        out,
                        rng,
                    )?;
                }
                RowMode::Partition(partition) => {
                    let mut left = k;
                    let mut p = pool;
                    for g in partition.row(i) {
                        if left == 0 {
                            break;
                        }
                        let pg: u64 = g.members.iter().map(|&m| self.resp[m]).sum();
                        let x = take(&mut p, pg, &mut left, last, &mut self.draws, rng);
                        if x == 0 {
                            continue;
                        }
                        out.add(g.output, x);
                        split(&g.members, x, pg, &mut self.resp, &mut self.draws, out, rng);
                    }
                }
                RowMode::Skip { skips, members } => {
                    let mut left = k;
                    let mut p = pool;
                    let skip_row = &members[i];
                    let ps: u64 = skip_row.iter().map(|&m| self.resp[m]).sum();
                    let x = take(&mut p, ps, &mut left, last, &mut self.draws, rng);
                    if x > 0 {
                        out.add(i, x);
                        split(skip_row, x, ps, &mut self.resp, &mut self.draws, out, rng);
                    }
                    for &j in order {
                        if left == 0 {
                            break;
                        }
                        if skips.contains(i, j) {
                            continue;
                        }
                        let e = self.resp[j];
                        let x = take(&mut p, e, &mut left, last, &mut self.draws, rng);
                        if x > 0 {
                            self.resp[j] -= x;
                            emit(protocol, i, j, x, rng, out)?;
                        }
                    }
                }
            }
            pool -= k;
            if pool == 0 {
                break;
            }
        }
        Ok(())
    }
}

/// Draws how many of the `left` remaining picks land in a category of size
/// `size` out of a pool `p`, and shrinks the pool past that category.
#[inline]
fn take(
    p: &mut u64,
    size: u64,
    left: &mut u64,
    last: bool,
    draws: &mut u64,
    rng: &mut RngStream,
) -> u64 {
    if size == 0 || *left == 0 {
        *p -= size;
        return 0;
    }
    let x = if last {
        size
    } else {
        *draws += 1;
        hyper(*p, size, *left, rng)
    };
    *p -= size;
    *left -= x;
    x
}

/// Splits `x` responders of a coalesced category over its member states and
/// returns them to `out` unchanged.
fn split(
    members: &[State],
    x: u64,
    size: u64,
    resp: &mut [u64],
    draws: &mut u64,
    out: &mut Pool,
    rng: &mut RngStream,
) {
    let mut p = size;
    let mut left = x;
    for &m in members {
        if left == 0 {
            break;
        }
        let e = resp[m];
        let y = take(&mut p, e, &mut left, x == size, draws, rng);
        if y > 0 {
            resp[m] -= y;
            out.add(m, y);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn plain_row<P: Protocol + ?Sized>(
    i: State,
    k: u64,
    pool: u64,
    last: bool,
    order: &[State],
    resp: &mut [u64],
    draws: &mut u64,
    protocol: &P,
    out: &mut Pool,
    rng: &mut RngStream,
) -> Result<()> {
    let mut left = k;
    let mut p = pool;
    for &j in order {
        if left == 0 {
            break;
        }
        let e = resp[j];
        let x = take(&mut p, e, &mut left, last, draws, rng);
        if x > 0 {
            resp[j] -= x;
            emit(protocol, i, j, x, rng, out)?;
        }
    }
    Ok(())
}

#[inline]
fn emit<P: Protocol + ?Sized>(
    protocol: &P,
    i: State,
    j: State,
    x: u64,
    rng: &mut RngStream,
    out: &mut Pool,
) -> Result<()> {
    if let Some(t) = protocol.table() {
        let (a, b) = t.get(i, j);
        out.add(a, x);
        out.add(b, x);
        Ok(())
    } else {
        checked_batch_apply(protocol, i, j, x, rng, &mut |s, c| out.add(s, c))
    }
}
