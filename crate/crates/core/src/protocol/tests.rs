use proptest::prelude::*;

use super::*;
use crate::Configuration;

fn all_assigned<P: Protocol + ?Sized>(p: &P, a: State, b: State, num: u64, seed: u64) -> Vec<u64> {
    let mut out = vec![0; p.num_states()];
    let mut rng = RngStream::new(seed);
    checked_batch_apply(p, a, b, num, &mut rng, &mut |s, c| out[s] += c).unwrap();
    out
}

#[test]
fn leader_election_transitions() {
    let p = leader_election();
    let mut rng = RngStream::new(0);
    assert_eq!(p.apply(LEADER, LEADER, &mut rng), (FOLLOWER, LEADER));
    assert_eq!(p.apply(LEADER, FOLLOWER, &mut rng), (LEADER, FOLLOWER));
    assert_eq!(p.apply(FOLLOWER, FOLLOWER, &mut rng), (FOLLOWER, FOLLOWER));
    assert!(p.is_one_way());
}

#[test]
fn checked_apply_rejects_out_of_range() {
    let p = leader_election();
    let mut rng = RngStream::new(0);
    assert!(matches!(
        checked_apply(&p, 2, 0, &mut rng),
        Err(Error::StateOutOfRange { state: 2, .. })
    ));
}

#[test]
fn phase_clock_follower_row() {
    let p = phase_clock(8).unwrap();
    let t = p.table().unwrap();
    let unmarked = |phase: usize| 2 * phase;
    let row: Vec<usize> = (0..4)
        .map(|r| t.get(unmarked(1), unmarked(r)).0 / 2)
        .collect();
    assert_eq!(row, vec![1, 1, 2, 1]);
    assert_eq!(t.get(unmarked(1), 2 + 1).0, unmarked(2));
    assert_eq!(t.get(2 + 1, unmarked(1)).0, 2 * 2 + 1);
    assert_eq!(t.get(2 * 3 + 1, unmarked(0)).0, 1);
    assert!(p.is_one_way());
    assert!(phase_clock(6).is_ok());
    assert!(phase_clock(5).is_err());
    assert!(phase_clock(2).is_err());
}

#[test]
fn running_clock_start() {
    let c = running_clock_initial(8, 1 << 20);
    assert_eq!(c.count(1), 1 << 10);
    assert_eq!(c.agents(), 1 << 20);
    assert!(c.counts()[2..].iter().all(|&x| x == 0));
}

#[test]
fn deterministic_lift() {
    let p = random_two_way(4, 3).unwrap();
    let (a, b) = p.table().unwrap().get(1, 2);
    let out = all_assigned(&p, 1, 2, 7, 0);
    let mut expected = vec![0; 4];
    expected[a] += 7;
    expected[b] += 7;
    assert_eq!(out, expected);
    let single = all_assigned(&p, 1, 2, 1, 0);
    let mut one = vec![0; 4];
    one[a] += 1;
    one[b] += 1;
    assert_eq!(single, one);
}

#[test]
fn coin_protocol_splits_binomially() {
    let p = coin_increment(5).unwrap();
    let reps = 20_000;
    let mut heads_total = 0u64;
    for seed in 0..reps {
        let out = all_assigned(&p, 0, 3, 10, seed);
        assert_eq!(out.iter().sum::<u64>(), 20);
        assert_eq!(out[1], out[3]);
        assert_eq!(out[0], out[4]);
        assert_eq!(out[1] + out[0], 10);
        heads_total += out[1];
    }
    let mean = heads_total as f64 / reps as f64;
    assert!((mean - 5.0).abs() < 0.05, "{mean}");
    assert!(p.table().is_none());
    assert!(!p.is_one_way());
}

struct Leaky;

impl Protocol for Leaky {
    fn name(&self) -> &str {
        "leaky"
    }

    fn num_states(&self) -> usize {
        2
    }

    fn apply(&self, a: State, b: State, _: &mut RngStream) -> (State, State) {
        (a, b)
    }

    fn batch_apply(
        &self,
        a: State,
        _: State,
        num: u64,
        _: &mut RngStream,
        assign: &mut dyn FnMut(State, u64),
    ) {
        assign(a, num);
    }
}

#[test]
fn batch_contract_is_enforced() {
    let mut rng = RngStream::new(0);
    let r = checked_batch_apply(&Leaky, 0, 1, 3, &mut rng, &mut |_, _| {});
    assert!(matches!(
        r,
        Err(Error::BatchContract {
            num: 3,
            assigned: 3,
            expected: 6
        })
    ));
}

#[test]
fn partition_of_phase_clock_row() {
    let p = phase_clock(8).unwrap();
    let part = p.table().unwrap().build_partition().unwrap();
    let groups = part.row(2);
    let unmarked_to_2: Vec<&Group> = groups.iter().filter(|g| g.output == 2).collect();
    let unmarked_to_4: Vec<&Group> = groups.iter().filter(|g| g.output == 4).collect();
    assert_eq!(unmarked_to_4[0].members, vec![3, 4, 5]);
    assert_eq!(unmarked_to_2[0].members, vec![0, 1, 2, 6, 7]);
}

#[test]
fn partition_shapes() {
    let id = identity(4).unwrap();
    let part = id.table().unwrap().build_partition().unwrap();
    for a in 0..4 {
        assert_eq!(part.row(a).len(), 1);
        assert_eq!(part.row(a)[0].output, a);
    }
    let copy = TransitionTable::from_fn(4, |_, b| (b, b)).unwrap();
    let part = copy.build_partition().unwrap();
    for a in 0..4 {
        assert_eq!(part.row(a).len(), 4);
    }
    let two_way = random_two_way(3, 1).unwrap();
    assert!(matches!(
        two_way.table().unwrap().build_partition(),
        Err(Error::NotOneWay)
    ));
}

#[test]
fn skip_sets() {
    let le = leader_election();
    let skips = le.table().unwrap().detect_skips();
    let mut pairs: Vec<_> = skips.pairs().collect();
    pairs.sort();
    assert_eq!(
        pairs,
        vec![(FOLLOWER, FOLLOWER), (FOLLOWER, LEADER), (LEADER, FOLLOWER)]
    );
    assert_eq!(
        identity(5).unwrap().table().unwrap().detect_skips().len(),
        25
    );
    assert_eq!(swap(5).unwrap().table().unwrap().detect_skips().len(), 25);
}

#[test]
fn renaming_examples() {
    assert_eq!(renaming_permutation(&[13, 5, 0, 8, 4]), vec![0, 3, 1, 4, 2]);
    assert_eq!(renaming_permutation(&[3, 3, 3]), vec![0, 1, 2]);
    assert_eq!(renaming_permutation(&[0, 9]), vec![1, 0]);
    let c = Configuration::spread(4, 10);
    assert_eq!(renaming_permutation(c.counts()), vec![0, 1, 2, 3]);
}

#[test]
fn random_two_way_is_reproducible() {
    assert_eq!(
        random_two_way(6, 11).unwrap().table(),
        random_two_way(6, 11).unwrap().table()
    );
    assert_ne!(
        random_two_way(6, 11).unwrap().table(),
        random_two_way(6, 12).unwrap().table()
    );
}

proptest! {
    #[test]
    fn partition_agrees_with_apply(q in 4usize..24, seed in any::<u64>()) {
        let q = q & !1;
        let clock = phase_clock(q).unwrap();
        let copy = TransitionTable::from_fn(q, |a, b| ((a * 7 + b * (seed as usize % 5)) % q, b)).unwrap();
        for table in [clock.table().unwrap(), &copy] {
            let part = table.build_partition().unwrap();
            for a in 0..q {
                let mut seen = vec![false; q];
                for g in part.row(a) {
                    for &b in &g.members {
                        prop_assert!(!seen[b]);
                        seen[b] = true;
                        prop_assert_eq!(table.get(a, b).0, g.output);
                    }
                }
                prop_assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn batch_apply_conserves_agents(q in 1usize..10, seed in any::<u64>(), num in 1u64..1000) {
        let coin = coin_increment(q).unwrap();
        let rtw = random_two_way(q, seed).unwrap();
        let mut rng = RngStream::new(seed);
        let a = rng.below(q as u64) as usize;
        let b = rng.below(q as u64) as usize;
        for p in [&coin as &dyn Protocol, &rtw] {
            let out = all_assigned(p, a, b, num, seed);
            prop_assert_eq!(out.iter().sum::<u64>(), 2 * num);
        }
    }

    #[test]
    fn skip_set_matches_definition(q in 1usize..8, seed in any::<u64>()) {
        let rtw = random_two_way(q, seed).unwrap();
        let t = rtw.table().unwrap();
        let skips = t.detect_skips();
        for a in 0..q {
            for b in 0..q {
                let out = t.get(a, b);
                prop_assert_eq!(skips.contains(a, b), out == (a, b) || out == (b, a));
            }
        }
    }
}
