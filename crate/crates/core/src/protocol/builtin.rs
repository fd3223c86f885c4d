use super::{Protocol, TableProtocol, TransitionTable};
use crate::{Configuration, Error, Result, RngStream, State};

pub const FOLLOWER: State = 0;
pub const LEADER: State = 1;

/// Two leaders meeting demote the initiator.
pub fn leader_election() -> TableProtocol {
    let table = TransitionTable::from_fn(2, |a, b| if a == b { (FOLLOWER, b) } else { (a, b) })
        .expect("two-state table");
    TableProtocol::new("leader-election", table)
}

pub fn identity(q: usize) -> Result<TableProtocol> {
    Ok(TableProtocol::new(
        "identity",
        TransitionTable::from_fn(q, |a, b| (a, b))?,
    ))
}

pub fn swap(q: usize) -> Result<TableProtocol> {
    Ok(TableProtocol::new(
        "swap",
        TransitionTable::from_fn(q, |a, b| (b, a))?,
    ))
}

/// One-way phase clock over `m = q/2` circular phases.
///
/// State `2·p + k` is phase `p` with mark bit `k`. With `d = (p_resp − p_init)
/// mod m`, an unmarked initiator advances one phase iff `1 ≤ d < m/2`, or
/// `d = 0` and the responder is marked; a marked initiator advances iff
/// `d < m/2`. The mark bit never changes.
pub fn phase_clock(q: usize) -> Result<TableProtocol> {
    if q < 4 || !q.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "phase clock needs an even state count of at least 4, got {q}"
        )));
    }
    let m = q / 2;
    let half = m / 2;
    let table = TransitionTable::from_fn(q, |a, b| {
        let (pa, ka) = (a / 2, a % 2);
        let (pb, kb) = (b / 2, b % 2);
        let d = (pb + m - pa) % m;
        let advance = if ka == 1 {
            d < half
        } else {
            (1..half).contains(&d) || (d == 0 && kb == 1)
        };
        let pa = if advance { (pa + 1) % m } else { pa };
        (2 * pa + ka, b)
    })?;
    Ok(TableProtocol::new("phase-clock", table))
}

/// `⌊√n⌋` marked agents and everyone else unmarked, all in phase 0.
pub fn running_clock_initial(q: usize, n: u64) -> Configuration {
    let marked = n.isqrt();
    let mut counts = vec![0; q];
    counts[0] = n - marked;
    counts[1] = marked;
    Configuration::new(counts)
}

/// Two-way protocol whose outputs are drawn uniformly from the state set,
/// reproducibly from `seed`.
pub fn random_two_way(q: usize, seed: u64) -> Result<TableProtocol> {
    let mut rng = RngStream::new(seed);
    let table = TransitionTable::from_fn(q, |_, _| {
        let a = rng.below(q as u64) as State;
        let b = rng.below(q as u64) as State;
        (a, b)
    })?;
    Ok(TableProtocol::new("random-two-way", table))
}

/// A fair coin picks whether the initiator or the responder advances one
/// state, circularly.
#[derive(Clone, Debug)]
pub struct CoinIncrement {
    q: usize,
}

pub fn coin_increment(q: usize) -> Result<CoinIncrement> {
    if q == 0 {
        return Err(Error::InvalidParameter(
            "coin protocol needs a state".into(),
        ));
    }
    Ok(CoinIncrement { q })
}

impl Protocol for CoinIncrement {
    fn name(&self) -> &str {
        "coin-increment"
    }

    fn num_states(&self) -> usize {
        self.q
    }

    fn apply(&self, initiator: State, responder: State, rng: &mut RngStream) -> (State, State) {
        if rng.next_u64() >> 63 == 1 {
            ((initiator + 1) % self.q, responder)
        } else {
            (initiator, (responder + 1) % self.q)
        }
    }

    fn batch_apply(
        &self,
        initiator: State,
        responder: State,
        num: u64,
        rng: &mut RngStream,
        assign: &mut dyn FnMut(State, u64),
    ) {
        let heads = rand_distr::Distribution::sample(
            &rand_distr::Binomial::new(num, 0.5).expect("valid binomial"),
            rng,
        );
        assign((initiator + 1) % self.q, heads);
        assign(responder, heads);
        assign(initiator, num - heads);
        assign((responder + 1) % self.q, num - heads);
    }

    fn outcome_distribution(
        &self,
        initiator: State,
        responder: State,
    ) -> Option<Vec<((State, State), f64)>> {
        Some(vec![
            (((initiator + 1) % self.q, responder), 0.5),
            ((initiator, (responder + 1) % self.q), 0.5),
        ])
    }
}
