use std::collections::BTreeMap;

use popsim::oracle::{chi_square_configs, exact_distribution, total_variation, ConfigDistribution};
use popsim::protocol::{coin_increment, leader_election, phase_clock, Protocol, LEADER};
use popsim::{simulate, Configuration, RngStream, SimConfig, Simulator};

fn run(
    sim: Simulator,
    protocol: &dyn Protocol,
    initial: &Configuration,
    interactions: u64,
    every: u64,
    seed: u64,
) -> Vec<(u64, Vec<u64>)> {
    let mut config = SimConfig::new(sim, interactions);
    config.snapshot_every = every;
    let mut snaps = Vec::new();
    let mut rng = RngStream::new(seed);
    let out = simulate(&config, protocol, initial, &mut rng, &mut |t, c| {
        snaps.push((t, c.to_vec()))
    })
    .unwrap();
    assert_eq!(out.interactions, interactions);
    assert_eq!(snaps.last().unwrap().1, out.configuration.counts());
    snaps
}

#[test]
fn coin_increments_add_exactly_one_per_interaction() {
    // Without wrap-around, the sum of states grows by one per interaction.
    let q = 128;
    let n = 20_000;
    let p = coin_increment(q).unwrap();
    let start = Configuration::uniform_state(q, 0, n).unwrap();
    for sim in Simulator::ALL {
        for (t, counts) in run(sim, &p, &start, 60_000, 7_000, 3) {
            let level: u64 = counts.iter().enumerate().map(|(s, &c)| s as u64 * c).sum();
            assert_eq!(level, t, "{sim}");
            assert_eq!(counts.iter().sum::<u64>(), n, "{sim}");
        }
    }
}

#[test]
fn leaders_never_increase_or_vanish() {
    let p = leader_election();
    let start = Configuration::uniform_state(2, LEADER, 5_000).unwrap();
    for sim in Simulator::ALL {
        let snaps = run(sim, &p, &start, 200_000, 10_000, 8);
        assert_eq!(snaps.len(), 21, "{sim}");
        let leaders: Vec<u64> = snaps.iter().map(|s| s.1[LEADER]).collect();
        assert!(
            leaders.windows(2).all(|w| w[1] <= w[0]),
            "{sim}: {leaders:?}"
        );
        // Mean field: dL/dt = -L²/n², so L(t) = 1/(1/L0 + t/n²) ≈ 122 here.
        let last = *leaders.last().unwrap();
        assert!((80..=180).contains(&last), "{sim}: {last}");
    }
}

#[test]
fn every_simulator_is_reproducible() {
    let p = phase_clock(8).unwrap();
    let start = Configuration::spread(8, 50_000);
    for sim in Simulator::ALL {
        let a = run(sim, &p, &start, 100_000, 25_000, 21);
        let b = run(sim, &p, &start, 100_000, 25_000, 21);
        let c = run(sim, &p, &start, 100_000, 25_000, 22);
        assert_eq!(a, b, "{sim}");
        assert_ne!(a, c, "{sim}");
    }
}

#[test]
fn randomized_protocol_matches_exact_chain() {
    let p = coin_increment(3).unwrap();
    let start = Configuration::new(vec![4, 0, 1]);
    let horizon = 7;
    let exact = exact_distribution(&p, &start, horizon).unwrap();
    let reps = 200_000;
    for sim in Simulator::ALL {
        let mut config = SimConfig::new(sim, horizon);
        config.alias.enforce_size_bound = false;
        let mut hist = BTreeMap::new();
        for i in 0..reps {
            let mut rng = RngStream::new(popsim::derive_seed(40, i));
            let out = simulate(&config, &p, &start, &mut rng, &mut |_, _| {}).unwrap();
            *hist.entry(out.configuration.into_counts()).or_insert(0u64) += 1;
        }
        let tv = total_variation(&ConfigDistribution::empirical(&hist), &exact);
        let pval = chi_square_configs(&hist, &exact).unwrap();
        assert!(tv < 0.01 && pval > 1e-4, "{sim}: tv {tv} p {pval}");
    }
}
