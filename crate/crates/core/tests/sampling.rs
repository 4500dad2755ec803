mod common;

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use tcpm::diffusion::sample_realization;
use tcpm::error::Error;
use tcpm::network::{DiffusionParams, Graph, NodeId, TCNetwork};
use tcpm::rng;
use tcpm::sampling::{
    delta1, delta2, delta2_star, generate_ra_set, search_rat_params, solve_ras_params, RACollection, RAScratch,
};

use common::chain;

/// Member set reached backwards from a uniform root over a fully sampled
/// realization.
fn reference_ra_set(net: &TCNetwork, s: &mut rng::Stream) -> Vec<NodeId> {
    use rand::Rng;
    let real = sample_realization(net, s);
    let root = s.random_range(0..net.node_count()) as NodeId;
    let mut seen = vec![false; net.node_count()];
    let mut out = vec![root];
    seen[root as usize] = true;
    let mut head = 0;
    while head < out.len() {
        let u = out[head];
        head += 1;
        for &w in real.triggering_set(u) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                out.push(w);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Two-sample chi-squared homogeneity test; returns the p-value.
fn homogeneity_p(a: &BTreeMap<Vec<NodeId>, u64>, b: &BTreeMap<Vec<NodeId>, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    // pool rare categories so every expected count is at least 5
    let (mut cells, mut rare) = (Vec::new(), (0u64, 0u64));
    for k in keys {
        let (x, y) = (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
        if (x + y) as f64 * na.min(nb) as f64 / (na + nb) as f64 >= 5.0 {
            cells.push((x, y));
        } else {
            rare = (rare.0 + x, rare.1 + y);
        }
    }
    if rare.0 + rare.1 > 0 {
        cells.push(rare);
    }
    let total = (na + nb) as f64;
    let mut stat = 0.0;
    for &(x, y) in &cells {
        let row = (x + y) as f64;
        for (obs, col) in [(x, na), (y, nb)] {
            let expect = row * col as f64 / total;
            stat += (obs as f64 - expect).powi(2) / expect;
        }
    }
    let df = (cells.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

fn lazy_matches_reference(net: &TCNetwork, seed: u64) {
    let samples = 100_000;
    let mut lazy = BTreeMap::new();
    let mut scratch = RAScratch::new(net.node_count());
    let mut s = rng::stream(seed, 0);
    for _ in 0..samples {
        let mut m = generate_ra_set(net, &mut s, &mut scratch).members;
        m.sort_unstable();
        *lazy.entry(m).or_insert(0u64) += 1;
    }
    let mut full = BTreeMap::new();
    let mut s = rng::stream(seed, 1);
    for _ in 0..samples {
        *full.entry(reference_ra_set(net, &mut s)).or_insert(0u64) += 1;
    }
    let p = homogeneity_p(&lazy, &full);
    assert!(p > 0.001, "lazy and full-realization RA sets differ (p = {p})");
}

fn five_nodes(params: DiffusionParams) -> TCNetwork {
    let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 2), (1, 4), (4, 3), (0, 4)]).unwrap();
    TCNetwork::build(g, params, 0.5, 0.2, vec![0.9, 0.6, 0.7, 0.4, 0.8]).unwrap()
}

#[test]
fn lazy_generation_matches_full_realization_ic() {
    lazy_matches_reference(&five_nodes(DiffusionParams::ic_constant(0.4)), 1);
    lazy_matches_reference(&five_nodes(DiffusionParams::ic_weighted()), 2);
}

#[test]
fn lazy_generation_matches_full_realization_lt() {
    lazy_matches_reference(&five_nodes(DiffusionParams::linear_threshold()), 3);
}

#[test]
fn certain_chain_root_reaches_source() {
    let net = chain(1.0, 0.5, 0.25, 0.9);
    let coll = RACollection::generate(&net, 1000, 5);
    for (i, set) in coll.iter().enumerate() {
        let want: &[NodeId] = if coll.root(i) == 1 { &[1, 0] } else { &[0] };
        assert_eq!(set, want);
    }
    // every set contains v1, so F({v1}) = 2P - C
    assert!((coll.estimate(&[true, false]) - 0.75).abs() < 1e-12);
}

#[test]
fn ra_indicator_mean_matches_spread_over_n() {
    let net = chain(0.5, 0.5, 0.25, 0.9);
    let coll = RACollection::generate(&net, 200_000, 6);
    let p = coll.sets_containing(0).len() as f64 / coll.len() as f64;
    let se = (0.75 * 0.25 / coll.len() as f64).sqrt();
    assert!((p - 0.75).abs() <= 3.0 * se, "{p}");
}

#[test]
fn extend_appends_and_index_stays_consistent() {
    let net = five_nodes(DiffusionParams::ic_constant(0.4));
    let mut coll = RACollection::generate(&net, 100, 7);
    let before: Vec<Vec<NodeId>> = coll.iter().map(<[NodeId]>::to_vec).collect();
    coll.extend(&net, 150, 7);
    assert_eq!(coll.len(), 250);
    for (i, set) in before.iter().enumerate() {
        assert_eq!(coll.set(i), &set[..]);
    }
    for v in 0..5 {
        let listed = coll.sets_containing(v);
        let scanned: Vec<u32> = (0..coll.len() as u32).filter(|&i| coll.set(i as usize).contains(&v)).collect();
        assert_eq!(listed, &scanned[..]);
    }
    assert_eq!(coll.total_size(), coll.iter().map(<[NodeId]>::len).sum::<usize>());
}

#[test]
fn cache_round_trip_and_mismatch() {
    let net = five_nodes(DiffusionParams::ic_weighted());
    let coll = RACollection::generate(&net, 300, 8);
    let mut bytes = Vec::new();
    coll.write_cache(&mut bytes, net.fingerprint()).unwrap();
    let back = RACollection::read_cache(&bytes[..], &net).unwrap();
    assert!(coll.iter().eq(back.iter()));
    for v in 0..5 {
        assert_eq!(coll.sets_containing(v), back.sets_containing(v));
    }

    let other = five_nodes(DiffusionParams::linear_threshold());
    assert!(matches!(RACollection::read_cache(&bytes[..], &other), Err(Error::Format(_))));
    assert!(RACollection::read_cache(&bytes[..bytes.len() - 1], &net).is_err());
    assert!(RACollection::read_cache(&b"nope"[..], &net).is_err());
}

#[test]
fn grid_search_is_feasible_and_optimal() {
    for (n, big_n, eps, r) in [(100, 100.0, 0.4, 0.1), (20, 5.0, 0.1, 0.8), (5000, 5000.0, 0.25, 0.3)] {
        let (e1, e2) = search_rat_params(n, big_n, eps, r, 0.01).unwrap();
        assert!((e1 + 0.5 * e2 - eps).abs() < 1e-12);
        let chosen = delta1(n, big_n, e1, r).unwrap().max(delta2(big_n, e2, r).unwrap());
        let mut i = 1;
        while (i as f64) * 0.01 < eps {
            let c = i as f64 * 0.01;
            let cost = delta1(n, big_n, c, r).unwrap().max(delta2(big_n, 2.0 * (eps - c), r).unwrap());
            assert!(chosen <= cost);
            i += 1;
        }
    }
    assert!(search_rat_params(10, 10.0, 0.005, 0.5, 0.01).is_err());
}

#[test]
fn larger_k_needs_fewer_initial_sets() {
    for (n, big_n, eps, r) in [(100, 100.0, 0.4, 0.1), (1000, 1000.0, 0.3, 0.5)] {
        let d: Vec<f64> = (3..=8).map(|k| solve_ras_params(n, big_n, eps, r, k, 0.1).unwrap().delta2_star).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        for k in 3..=8 {
            let p = solve_ras_params(n, big_n, eps, r, k, 0.1).unwrap();
            assert!((p.delta2_star - delta2_star(big_n, p.epsilon2, r).unwrap()).abs() < 1e-9 * p.delta2_star);
        }
    }
}

#[test]
fn solver_rejects_bad_inputs() {
    assert!(matches!(solve_ras_params(100, 100.0, 0.6, 0.1, 5, 0.1), Err(Error::Parameter(_))));
    assert!(solve_ras_params(100, 100.0, 0.4, 0.1, 0, 0.1).is_err());
    assert!(solve_ras_params(100, 100.0, 0.4, 0.1, 5, 0.0).is_err());
}
