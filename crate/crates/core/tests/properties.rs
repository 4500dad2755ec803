mod common;

use proptest::prelude::*;
use tcpm::diffusion::exact::{exact_profit, mask_of, ExactTable};
use tcpm::diffusion::{replay_on_realization, simulate_once, RealizationSet, ReplayScratch, SimScratch};
use tcpm::network::{DiffusionParams, Graph, Model, NodeId, TCNetwork};
use tcpm::optimize::{double_greedy, ExactOracle};
use tcpm::rng;
use tcpm::sampling::RACollection;

use common::{random_network, test_stream};

fn small_net(seed: u64) -> TCNetwork {
    random_network(&mut test_stream(seed), 2..=6, 1 << 12)
}

/// (n, edges, intrinsic values, price, coupon fraction, model index)
type RawNetwork = (usize, Vec<(u32, u32)>, Vec<f64>, f64, f64, u8);

fn raw_network() -> impl Strategy<Value = RawNetwork> {
    (2usize..12).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n as u32, 0..n as u32), 0..3 * n),
            prop::collection::vec(0.0f64..=1.0, n),
            0.05f64..=1.0,
            0.0f64..0.95,
            0u8..3,
        )
    })
}

fn params(kind: u8) -> DiffusionParams {
    match kind {
        0 => DiffusionParams::ic_constant(0.3),
        1 => DiffusionParams::ic_weighted(),
        _ => DiffusionParams::linear_threshold(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pruning_keeps_exactly_the_affordable_nodes((n, edges, intrinsic, price, frac, kind) in raw_network()) {
        let coupon = price * frac;
        let g = Graph::from_edges(n, &edges).unwrap();
        let keep = intrinsic.iter().filter(|&&i| price <= i + coupon + 1e-12).count();
        match TCNetwork::build(g, params(kind), price, coupon, intrinsic.clone()) {
            Ok(net) => {
                prop_assert_eq!(net.node_count(), keep);
                prop_assert!((net.discount_ratio() - (price - coupon) / price).abs() == 0.0);
                for v in 0..net.node_count() as NodeId {
                    let i = net.intrinsic()[v as usize];
                    prop_assert!(price <= i + coupon + 1e-12);
                    prop_assert_eq!(net.adopter_eligible(v), i >= price);
                }
                // pruning again changes nothing
                let again = TCNetwork::build(
                    net.graph().clone(), net.params(), price, coupon, net.intrinsic().to_vec()).unwrap();
                prop_assert_eq!(again.node_count(), net.node_count());
                prop_assert_eq!(again.edge_count(), net.edge_count());
                prop_assert_eq!(again.fingerprint(), net.fingerprint());
            }
            Err(_) => prop_assert_eq!(keep, 0),
        }
    }

    #[test]
    fn lt_weights_are_inverse_in_degree((n, edges, intrinsic, price, frac, _k) in raw_network()) {
        let g = Graph::from_edges(n, &edges).unwrap();
        if let Ok(net) = TCNetwork::build(g, DiffusionParams::linear_threshold(), price, price * frac, intrinsic) {
            for v in 0..net.node_count() as NodeId {
                let probs = net.in_probs(v);
                let d = net.graph().in_degree(v) as f64;
                prop_assert!(probs.iter().all(|&w| w == 1.0 / d));
                prop_assert!(probs.iter().sum::<f64>() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn full_seeding_earns_the_full_profit(seed in any::<u64>()) {
        let net = small_net(seed);
        let all: Vec<NodeId> = (0..net.node_count() as NodeId).collect();
        let full = net.full_profit();
        prop_assert!((exact_profit(&net, &all).unwrap() - full).abs() < 1e-12);
        prop_assert_eq!(exact_profit(&net, &[]).unwrap(), 0.0);
        let pool = RealizationSet::generate(&net, 20, seed, 1 << 20).unwrap();
        prop_assert!((pool.estimate(&all).mean_profit - full).abs() < 1e-12);
        let coll = RACollection::generate(&net, 50, seed);
        prop_assert!((coll.estimate(&vec![true; net.node_count()]) - full).abs() < 1e-12);
        prop_assert_eq!(coll.estimate(&vec![false; net.node_count()]), 0.0);
    }

    #[test]
    fn coverage_estimate_is_linear_in_covered_fraction(seed in any::<u64>(), mask in any::<u32>()) {
        let net = small_net(seed);
        let n = net.node_count();
        let coll = RACollection::generate(&net, 200, seed ^ 1);
        let seeds: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
        let hit = coll.iter().filter(|set| set.iter().any(|&v| seeds[v as usize])).count();
        let size = seeds.iter().filter(|&&b| b).count();
        let want = net.price() * n as f64 * hit as f64 / coll.len() as f64 - net.coupon() * size as f64;
        prop_assert_eq!(coll.covered_count(&seeds), hit);
        prop_assert!((coll.estimate(&seeds) - want).abs() < 1e-12);
    }

    #[test]
    fn coverage_estimate_is_submodular(seed in any::<u64>()) {
        let net = small_net(seed);
        let n = net.node_count();
        let coll = RACollection::generate(&net, 64, seed ^ 2);
        let f = |m: u32| coll.estimate(&(0..n).map(|v| m & (1 << v) != 0).collect::<Vec<_>>());
        let full = (1u32 << n) - 1;
        for s2 in 0..=full {
            let mut s1 = s2;
            loop {
                for v in (0..n).map(|v| 1u32 << v).filter(|b| s2 & b == 0) {
                    prop_assert!(f(s1 | v) - f(s1) >= f(s2 | v) - f(s2) - 1e-9);
                }
                if s1 == 0 { break; }
                s1 = (s1 - 1) & s2;
            }
        }
    }

    #[test]
    fn replay_is_deterministic_and_bounded(seed in any::<u64>(), mask in any::<u32>()) {
        let net = small_net(seed);
        let n = net.node_count();
        let seeds: Vec<NodeId> = (0..n as NodeId).filter(|v| mask & (1 << v) != 0).collect();
        let pool = RealizationSet::generate(&net, 30, seed, 1 << 20).unwrap();
        let mut scratch = ReplayScratch::new(n);
        for real in pool.realizations() {
            let a = replay_on_realization(real, &seeds, &mut scratch);
            prop_assert_eq!(a, replay_on_realization(real, &seeds, &mut scratch));
            prop_assert!(a >= seeds.len() && a <= n);
        }
        prop_assert_eq!(pool.estimate(&seeds), pool.estimate(&seeds));

        let mut sim = SimScratch::new(n);
        let mut s = rng::stream(seed, 9);
        for _ in 0..30 {
            let a = simulate_once(&net, &seeds, &mut s, &mut sim);
            prop_assert!(a >= seeds.len() && a <= n);
        }
    }

    #[test]
    fn double_greedy_stays_in_universe(seed in any::<u64>()) {
        let net = small_net(seed);
        let table = ExactTable::build(&net).unwrap();
        prop_assert!(table.profit(0) + table.profit(table.full_mask()) >= 0.0);
        let order: Vec<NodeId> = (0..net.node_count() as NodeId).rev().collect();
        let x = double_greedy(&mut ExactOracle::new(&table), net.node_count(), &order, &mut rng::stream(seed, 1)).unwrap();
        prop_assert!(x.members().iter().all(|&v| (v as usize) < net.node_count()));
        prop_assert_eq!(mask_of(&x.members()), x.bits());
    }
}

#[test]
fn both_lt_paths_agree_with_enumeration() {
    let g = Graph::from_edges(4, &[(0, 1), (2, 1), (1, 3), (0, 3), (2, 3)]).unwrap();
    let net = TCNetwork::build(g, DiffusionParams::linear_threshold(), 0.5, 0.2, vec![0.9, 0.7, 0.8, 0.6]).unwrap();
    assert_eq!(net.model(), Model::LinearThreshold);
    let seeds = [0];
    let exact = exact_profit(&net, &seeds).unwrap();
    let sim = tcpm::diffusion::estimate_profit_simulation(&net, &seeds, 100_000, 3);
    let real = RealizationSet::generate(&net, 100_000, 4, 1 << 30).unwrap().estimate(&seeds);
    assert!((sim.mean_profit - exact).abs() <= 4.0 * sim.std_error);
    assert!((real.mean_profit - exact).abs() <= 4.0 * real.std_error);
}
