use std::collections::BTreeMap;
use std::sync::Mutex;

use super::*;
use crate::oracle::{chi_square_configs, chi_square_gof, exact_distribution, ConfigDistribution};
use crate::protocol::{
    identity, leader_election, phase_clock, random_two_way, TableProtocol, TransitionTable, LEADER,
};

/// Records every batch it is asked to apply and returns agents unchanged.
struct Recorder {
    q: usize,
    cells: Mutex<Vec<(State, State, u64)>>,
}

impl Protocol for Recorder {
    fn name(&self) -> &str {
        "recorder"
    }

    fn num_states(&self) -> usize {
        self.q
    }

    fn apply(&self, a: State, b: State, _: &mut RngStream) -> (State, State) {
        (a, b)
    }

    fn batch_apply(
        &self,
        a: State,
        b: State,
        num: u64,
        _: &mut RngStream,
        assign: &mut dyn FnMut(State, u64),
    ) {
        self.cells.lock().unwrap().push((a, b, num));
        assign(a, num);
        assign(b, num);
    }
}

fn sample_cells(counts: &[u64], half_len: u64, seed: u64) -> Vec<(State, State, u64)> {
    let p = Recorder {
        q: counts.len(),
        cells: Mutex::new(Vec::new()),
    };
    let mut sampler = MatrixSampler::new(&p, &Heuristics::NONE);
    let mut c = Pool::new(counts.to_vec());
    let mut out = Pool::empty(counts.len());
    let order: Vec<State> = (0..counts.len()).collect();
    let mut rng = RngStream::new(seed);
    sampler
        .sample_apply(&mut c, half_len, &order, &p, &mut out, &mut rng)
        .unwrap();
    assert_eq!(out.total, 2 * half_len);
    assert_eq!(c.total + out.total, counts.iter().sum::<u64>());
    p.cells.into_inner().unwrap()
}

#[test]
fn single_state_matrix() {
    let cells = sample_cells(&[10, 0], 5, 1);
    assert_eq!(cells, vec![(0, 0, 5)]);
}

#[test]
fn matrix_rejects_oversized_batches() {
    let p = identity(2).unwrap();
    let mut sampler = MatrixSampler::new(&p, &Heuristics::NONE);
    let mut c = Pool::new(vec![2, 1]);
    let mut out = Pool::empty(2);
    let mut rng = RngStream::new(0);
    assert!(sampler
        .sample_apply(&mut c, 2, &[0, 1], &p, &mut out, &mut rng)
        .is_err());
}

#[test]
fn matrix_row_sums_are_hypergeometric() {
    let reps = 100_000u64;
    let mut both = 0u64;
    let mut hist = [0u64; 4];
    for seed in 0..reps {
        let cells = sample_cells(&[2, 2], 2, seed);
        assert_eq!(cells.iter().map(|c| c.2).sum::<u64>(), 2);
        let d0: u64 = cells.iter().filter(|c| c.0 == 0).map(|c| c.2).sum();
        both += u64::from(d0 == 2);
        let cells = sample_cells(&[6, 6], 3, seed + reps);
        let d0: u64 = cells.iter().filter(|c| c.0 == 0).map(|c| c.2).sum();
        hist[d0 as usize] += 1;
    }
    let p = both as f64 / reps as f64;
    let sd = (1.0 / 6.0 * 5.0 / 6.0 / reps as f64).sqrt();
    assert!((p - 1.0 / 6.0).abs() < 5.0 * sd, "{p}");
    let total = 220.0;
    let pmf = [20.0 / total, 90.0 / total, 90.0 / total, 20.0 / total];
    assert!(chi_square_gof(&hist, &pmf, reps).unwrap() > 1e-3);
}

/// Exact law of the updated agents after `half_len` interactions among
/// distinct agents, by enumerating ordered agent sequences.
fn exact_batch(protocol: &TableProtocol, counts: &[u64], half_len: usize) -> ConfigDistribution {
    let agents: Vec<State> = counts
        .iter()
        .enumerate()
        .flat_map(|(s, &c)| std::iter::repeat_n(s, c as usize))
        .collect();
    let mut hist = BTreeMap::new();
    let mut seq = Vec::new();
    let mut used = vec![false; agents.len()];
    fn rec(
        agents: &[State],
        used: &mut [bool],
        seq: &mut Vec<State>,
        need: usize,
        p: &TableProtocol,
        hist: &mut BTreeMap<Vec<u64>, u64>,
    ) {
        if seq.len() == need {
            let mut out = vec![0u64; p.num_states()];
            for pair in seq.chunks(2) {
                let (a, b) = p.table().unwrap().get(pair[0], pair[1]);
                out[a] += 1;
                out[b] += 1;
            }
            *hist.entry(out).or_insert(0) += 1;
            return;
        }
        for i in 0..agents.len() {
            if !used[i] {
                used[i] = true;
                seq.push(agents[i]);
                rec(agents, used, seq, need, p, hist);
                seq.pop();
                used[i] = false;
            }
        }
    }
    rec(
        &agents,
        &mut used,
        &mut seq,
        2 * half_len,
        protocol,
        &mut hist,
    );
    ConfigDistribution::empirical(&hist)
}

fn check_matrix_law(
    protocol: &TableProtocol,
    counts: &[u64],
    half_len: u64,
    heuristics: Heuristics,
) {
    let exact = exact_batch(protocol, counts, half_len as usize);
    let q = counts.len();
    let mut sampler = MatrixSampler::new(protocol, &heuristics);
    let mut rng = RngStream::new(half_len * 31 + q as u64);
    let mut hist = BTreeMap::new();
    let reps = 100_000u64;
    for _ in 0..reps {
        let mut c = Pool::new(counts.to_vec());
        let mut out = Pool::empty(q);
        let order = if heuristics.renaming {
            crate::protocol::renaming_permutation(counts)
        } else {
            (0..q).collect()
        };
        sampler
            .sample_apply(&mut c, half_len, &order, protocol, &mut out, &mut rng)
            .unwrap();
        *hist.entry(out.counts).or_insert(0u64) += 1;
    }
    let p = chi_square_configs(&hist, &exact).unwrap();
    assert!(p > 1e-4, "{} {heuristics:?}: p = {p}", protocol.name());
}

#[test]
fn matrix_law_matches_enumeration_under_every_heuristic() {
    let one_way = TableProtocol::new(
        "one-way",
        TransitionTable::from_fn(3, |a, b| (if a == b { a } else { (a + b) % 3 }, b)).unwrap(),
    );
    let two_way = random_two_way(3, 8).unwrap();
    let skippy = TableProtocol::new(
        "skippy",
        TransitionTable::from_fn(3, |a, b| if a < b { (b, a) } else { ((a + 1) % 3, b) }).unwrap(),
    );
    for h in all_heuristic_flags() {
        for p in [&one_way, &two_way, &skippy] {
            check_matrix_law(p, &[3, 2, 2], 2, h);
            check_matrix_law(p, &[1, 4, 2], 3, h);
        }
    }
}

fn all_heuristic_flags() -> Vec<Heuristics> {
    (0..8)
        .map(|m| Heuristics {
            renaming: m & 1 != 0,
            partitioning: m & 2 != 0,
            skipping: m & 4 != 0,
            controller: false,
        })
        .collect()
}

#[test]
fn identity_is_unchanged() {
    let p = identity(4).unwrap();
    let c = Configuration::new(vec![10, 20, 30, 40]);
    let mut rng = RngStream::new(2);
    let mut b = Batched::new(&p, &c, &Heuristics::ALL).unwrap();
    assert!(b.step(1000, &mut rng).unwrap() >= 1);
    assert_eq!(b.counts(), c.counts());
    let mut m = MultiBatched::new(&p, &c, &Heuristics::ALL).unwrap();
    m.epoch(EpochPolicy::TargetLength(50), 1000, &mut rng)
        .unwrap();
    assert_eq!(m.counts(), c.counts());
    for mode in [BatchMode::Batched, BatchMode::MultiBatched] {
        let options = BatchOptions {
            mode,
            heuristics: Heuristics::ALL,
            epoch_policy: None,
        };
        let (end, stats) = run_batched(
            &p,
            &c,
            1_000_000,
            1_000_000,
            &options,
            &mut rng,
            &mut |_, _| {},
        )
        .unwrap();
        assert_eq!(end, c);
        assert_eq!(stats.interactions, 1_000_000);
    }
}

#[test]
fn two_agents_always_advance_two() {
    let p = leader_election();
    let c = Configuration::uniform_state(2, LEADER, 2).unwrap();
    let mut rng = RngStream::new(1);
    for _ in 0..100 {
        let mut b = Batched::new(&p, &c, &Heuristics::NONE).unwrap();
        assert_eq!(b.step(u64::MAX, &mut rng).unwrap(), 2);
        assert_eq!(b.counts()[LEADER], 1);
    }
}

#[test]
fn zero_horizon_returns_initial() {
    let p = leader_election();
    let c = Configuration::uniform_state(2, LEADER, 5).unwrap();
    let options = BatchOptions {
        mode: BatchMode::MultiBatched,
        heuristics: Heuristics::ALL,
        epoch_policy: None,
    };
    let mut snaps = Vec::new();
    let (end, stats) = run_batched(
        &p,
        &c,
        0,
        1,
        &options,
        &mut RngStream::new(0),
        &mut |t, _| snaps.push(t),
    )
    .unwrap();
    assert_eq!(end, c);
    assert_eq!(stats.interactions, 0);
    assert_eq!(snaps, vec![0]);
}

#[test]
fn snapshots_land_on_exact_times() {
    let p = phase_clock(8).unwrap();
    let n = 1u64 << 16;
    let c = Configuration::spread(8, n);
    for mode in [BatchMode::Batched, BatchMode::MultiBatched] {
        let options = BatchOptions {
            mode,
            heuristics: Heuristics::ALL,
            epoch_policy: None,
        };
        let mut times = Vec::new();
        let (end, stats) = run_batched(
            &p,
            &c,
            100_003,
            10_000,
            &options,
            &mut RngStream::new(3),
            &mut |t, counts| {
                assert_eq!(counts.iter().sum::<u64>(), n);
                times.push(t);
            },
        )
        .unwrap();
        let expected: Vec<u64> = (0..=10).map(|i| i * 10_000).chain([100_003]).collect();
        assert_eq!(times, expected);
        assert_eq!(stats.interactions, 100_003);
        assert_eq!(end.agents(), n);
    }
}

#[test]
fn large_uniform_clock_conserves_agents() {
    let p = phase_clock(8).unwrap();
    let n = 1u64 << 20;
    let c = Configuration::spread(8, n);
    let options = BatchOptions {
        mode: BatchMode::MultiBatched,
        heuristics: Heuristics::ALL,
        epoch_policy: None,
    };
    let (end, stats) = run_batched(
        &p,
        &c,
        n,
        n,
        &options,
        &mut RngStream::new(4),
        &mut |_, _| {},
    )
    .unwrap();
    assert_eq!(end.agents(), n);
    assert_eq!(stats.interactions, n);
    assert!(stats.epochs > 10);
}

fn histogram<F: FnMut(u64) -> Configuration>(reps: u64, mut f: F) -> BTreeMap<Vec<u64>, u64> {
    let mut hist = BTreeMap::new();
    for seed in 0..reps {
        *hist.entry(f(seed).into_counts()).or_insert(0) += 1;
    }
    hist
}

fn run_mode(
    p: &dyn Protocol,
    c: &Configuration,
    horizon: u64,
    mode: BatchMode,
    heuristics: Heuristics,
    policy: Option<EpochPolicy>,
    seed: u64,
) -> Configuration {
    let options = BatchOptions {
        mode,
        heuristics,
        epoch_policy: policy,
    };
    let mut rng = RngStream::new(crate::derive_seed(seed, 17));
    run_batched(p, c, horizon, horizon, &options, &mut rng, &mut |_, _| {})
        .unwrap()
        .0
}

#[test]
fn small_instances_match_the_exact_chain() {
    let le = leader_election();
    let rtw = random_two_way(3, 2024).unwrap();
    let coin = crate::protocol::coin_increment(3).unwrap();
    let cases: Vec<(&dyn Protocol, Configuration, u64)> = vec![
        (&le, Configuration::uniform_state(2, LEADER, 4).unwrap(), 6),
        (&rtw, Configuration::new(vec![2, 2, 2]), 8),
        (&rtw, Configuration::new(vec![5, 2, 1]), 10),
        (&coin, Configuration::new(vec![3, 0, 2]), 5),
    ];
    for (p, c, horizon) in cases {
        let exact = exact_distribution(p, &c, horizon).unwrap();
        for mode in [BatchMode::Batched, BatchMode::MultiBatched] {
            for h in [Heuristics::NONE, Heuristics::ALL] {
                let hist = histogram(100_000, |s| run_mode(p, &c, horizon, mode, h, None, s));
                let pv = chi_square_configs(&hist, &exact).unwrap();
                assert!(pv > 1e-4, "{} {mode:?} {h:?}: p = {pv}", p.name());
            }
        }
    }
}

#[test]
fn long_epochs_match_the_exact_chain() {
    let rtw = random_two_way(3, 99).unwrap();
    let c = Configuration::new(vec![3, 3, 2]);
    let exact = exact_distribution(&rtw, &c, 10).unwrap();
    for policy in [
        EpochPolicy::Runs(1),
        EpochPolicy::Runs(5),
        EpochPolicy::TargetLength(100),
    ] {
        let hist = histogram(100_000, |s| {
            run_mode(
                &rtw,
                &c,
                10,
                BatchMode::MultiBatched,
                Heuristics::NONE,
                Some(policy),
                s,
            )
        });
        let pv = chi_square_configs(&hist, &exact).unwrap();
        assert!(pv > 1e-4, "{policy:?}: p = {pv}");
    }
}

#[test]
fn single_run_epochs_match_batched() {
    let rtw = random_two_way(3, 5).unwrap();
    let c = Configuration::new(vec![4, 3, 1]);
    let horizon = 7;
    let a = histogram(100_000, |s| {
        run_mode(
            &rtw,
            &c,
            horizon,
            BatchMode::MultiBatched,
            Heuristics::NONE,
            Some(EpochPolicy::Runs(1)),
            s,
        )
    });
    let b = histogram(100_000, |s| {
        run_mode(
            &rtw,
            &c,
            horizon,
            BatchMode::Batched,
            Heuristics::NONE,
            None,
            s + 1_000_000,
        )
    });
    let pv = chi_square_configs(&a, &ConfigDistribution::empirical(&b)).unwrap();
    assert!(pv > 1e-6, "p = {pv}");
}

#[test]
fn fixed_run_epochs_report_runs() {
    let p = phase_clock(8).unwrap();
    let c = Configuration::spread(8, 1 << 16);
    let mut m = MultiBatched::new(&p, &c, &Heuristics::ALL).unwrap();
    let mut rng = RngStream::new(8);
    let e = m.epoch(EpochPolicy::Runs(8), u64::MAX, &mut rng).unwrap();
    assert_eq!(e.runs, 8);
    assert!(e.agents >= 2 * (e.interactions - 8));
    assert_eq!(m.counts().iter().sum::<u64>(), 1 << 16);
}
