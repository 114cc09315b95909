//! Sampling and growth behaviour of the trade graph at realistic sizes.

use critnet_core::economy::{build_initial, SimConfig};
use critnet_core::graph::{AgentId, Direction, TradeGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 99.9% quantile of the chi-square distribution with 4 degrees of freedom.
const CHI2_DF4_P001: f64 = 18.466_826_952_903_17;

#[test]
fn preferential_sampling_passes_chi_square() {
    // in-degrees 0..=4, so weights 1..=5
    let mut g = TradeGraph::new(5).unwrap();
    for target in 1..5u32 {
        for _ in 0..target {
            g.add_edge(AgentId((target + 1) % 5), AgentId(target)).unwrap();
        }
    }
    let weights: Vec<f64> = (0..5).map(|i| f64::from(g.in_degree(AgentId(i)) + 1)).collect();
    assert_eq!(weights, vec![1.0, 2.0, 3.0, 4.0, 5.0]);

    let draws = 1_000_000;
    let mut counts = [0u64; 5];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..draws {
        counts[g.sample_preferential(Direction::In, &mut rng, None).index()] += 1;
    }
    let total: f64 = weights.iter().sum();
    let chi2: f64 = counts
        .iter()
        .zip(&weights)
        .map(|(&c, w)| {
            let expected = draws as f64 * w / total;
            (c as f64 - expected).powi(2) / expected
        })
        .sum();
    assert!(chi2 < CHI2_DF4_P001, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn identical_seeds_give_identical_graphs_and_samples() {
    let grow = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = TradeGraph::new(50).unwrap();
        let mut picks = Vec::new();
        for i in 0..2_000u32 {
            let s = g.sample_preferential(Direction::Out, &mut rng, None);
            let t = g.sample_preferential(Direction::In, &mut rng, Some(s));
            g.add_edge(s, t).unwrap();
            picks.push((s, t));
            if i % 97 == 0 {
                g.remove_in_edges(t);
            }
        }
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf, 2_000).unwrap();
        (picks, buf)
    };
    assert_eq!(grow(9), grow(9));
    assert_ne!(grow(9).0, grow(10).0);
}

#[test]
fn degree_sums_hold_after_ten_thousand_random_operations() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut g = TradeGraph::new(64).unwrap();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for _ in 0..10_000 {
        if rng.random_bool(0.8) {
            let s = rng.random_range(0..64u32);
            let t = rng.random_range(0..64u32);
            if s != t {
                g.add_edge(AgentId(s), AgentId(t)).unwrap();
                edges.push((s, t));
            } else {
                assert!(g.add_edge(AgentId(s), AgentId(t)).is_err());
            }
        } else {
            let t = rng.random_range(0..64u32);
            g.remove_in_edges(AgentId(t));
            edges.retain(|&(_, target)| target != t);
        }
        let outs: u64 = g.degrees(Direction::Out).iter().map(|&d| u64::from(d)).sum();
        let ins: u64 = g.degrees(Direction::In).iter().map(|&d| u64::from(d)).sum();
        assert_eq!(outs, g.edge_count());
        assert_eq!(ins, g.edge_count());
    }
    assert_eq!(g.edge_count(), edges.len() as u64);
    let mut recount_out = vec![0u32; 64];
    let mut recount_in = vec![0u32; 64];
    for &(s, t) in &edges {
        recount_out[s as usize] += 1;
        recount_in[t as usize] += 1;
    }
    assert_eq!(g.degrees(Direction::Out), &recount_out[..]);
    assert_eq!(g.degrees(Direction::In), &recount_in[..]);
    assert!(g.verify_conservation());
}

#[test]
fn preferential_growth_to_ten_thousand_edges_is_scale_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut g = TradeGraph::new(500).unwrap();
    while g.edge_count() < 10_000 {
        let s = g.sample_preferential(Direction::Out, &mut rng, None);
        let t = g.sample_preferential(Direction::In, &mut rng, Some(s));
        g.add_edge(s, t).unwrap();
    }
    let gamma = g.degree_histogram(Direction::In).exponent_fit().unwrap().exponent;
    assert!((2.1..=2.7).contains(&gamma), "gamma = {gamma}");
}

#[test]
fn initial_construction_in_degree_exponent() {
    let config = SimConfig {
        n_agents: 10_000,
        k_out_init: 1,
        ..SimConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = build_initial(&config, &mut rng).unwrap();
    assert!(g.degrees(Direction::Out).iter().all(|&d| d == 1));
    let gamma = g.degree_histogram(Direction::In).exponent_fit().unwrap().exponent;
    assert!((2.1..=2.7).contains(&gamma), "gamma = {gamma}");
}
