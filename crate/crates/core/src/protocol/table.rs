use super::Protocol;
use crate::{Error, Result, RngStream, State};

/// Deterministic transition function stored as a dense `q × q` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionTable {
    q: usize,
    delta: Vec<(u32, u32)>,
}

impl TransitionTable {
    /// Tabulates `f` over all ordered pairs.
    pub fn from_fn(q: usize, mut f: impl FnMut(State, State) -> (State, State)) -> Result<Self> {
        if q == 0 || q > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("invalid state count {q}")));
        }
        let mut delta = Vec::with_capacity(q * q);
        for a in 0..q {
            for b in 0..q {
                let (x, y) = f(a, b);
                for s in [x, y] {
                    if s >= q {
                        return Err(Error::StateOutOfRange {
                            state: s,
                            num_states: q,
                        });
                    }
                }
                delta.push((x as u32, y as u32));
            }
        }
        Ok(TransitionTable { q, delta })
    }

    pub fn num_states(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn get(&self, initiator: State, responder: State) -> (State, State) {
        let (a, b) = self.delta[initiator * self.q + responder];
        (a as State, b as State)
    }

    pub fn is_one_way(&self) -> bool {
        (0..self.q).all(|a| (0..self.q).all(|b| self.get(a, b).1 == b))
    }

    /// Groups each row's responders by the initiator output they cause.
    pub fn build_partition(&self) -> Result<RowPartition> {
        if !self.is_one_way() {
            return Err(Error::NotOneWay);
        }
        let mut rows = Vec::with_capacity(self.q);
        let mut slot = vec![usize::MAX; self.q];
        for a in 0..self.q {
            let mut groups: Vec<Group> = Vec::new();
            for b in 0..self.q {
                let out = self.get(a, b).0;
                if slot[out] == usize::MAX {
                    slot[out] = groups.len();
                    groups.push(Group {
                        output: out,
                        members: Vec::new(),
                    });
                }
                groups[slot[out]].members.push(b);
            }
            for g in &groups {
                slot[g.output] = usize::MAX;
            }
            rows.push(groups);
        }
        Ok(RowPartition { rows })
    }

    /// Pairs whose transition leaves the configuration unchanged.
    pub fn detect_skips(&self) -> SkipSet {
        let q = self.q;
        let mut skip = vec![false; q * q];
        for a in 0..q {
            for b in 0..q {
                let out = self.get(a, b);
                skip[a * q + b] = out == (a, b) || out == (b, a);
            }
        }
        SkipSet { q, skip }
    }
}

/// Responders of one initiator row sharing an initiator output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub output: State,
    pub members: Vec<State>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowPartition {
    rows: Vec<Vec<Group>>,
}

impl RowPartition {
    pub fn row(&self, initiator: State) -> &[Group] {
        &self.rows[initiator]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkipSet {
    q: usize,
    skip: Vec<bool>,
}

impl SkipSet {
    #[inline]
    pub fn contains(&self, initiator: State, responder: State) -> bool {
        self.skip[initiator * self.q + responder]
    }

    pub fn len(&self) -> usize {
        self.skip.iter().filter(|&&s| s).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (State, State)> + '_ {
        (0..self.q * self.q)
            .filter(|&i| self.skip[i])
            .map(|i| (i / self.q, i % self.q))
    }
}

/// A deterministic protocol given by its table.
#[derive(Clone, Debug)]
pub struct TableProtocol {
    name: String,
    table: TransitionTable,
}

impl TableProtocol {
    pub fn new(name: impl Into<String>, table: TransitionTable) -> Self {
        TableProtocol {
            name: name.into(),
            table,
        }
    }
}

impl Protocol for TableProtocol {
    fn name(&self) -> &str {
        &self.name
    }

    fn num_states(&self) -> usize {
        self.table.num_states()
    }

    fn table(&self) -> Option<&TransitionTable> {
        Some(&self.table)
    }

    #[inline]
    fn apply(&self, initiator: State, responder: State, _rng: &mut RngStream) -> (State, State) {
        self.table.get(initiator, responder)
    }
}
