mod common;

use tcpm::diffusion::exact::{mask_of, ExactTable};
use tcpm::diffusion::RealizationSet;
use tcpm::network::{DiffusionParams, Graph, NodeId, TCNetwork};
use tcpm::optimize::{
    double_greedy, ra_s_traced, ra_t, rpm, spm, FnOracle, NodeSet, Oracle, RasStop, RealizationOracle, RunConfig,
};
use tcpm::rng;
use tcpm::sampling::solve_ras_params;

use common::{chain, mean_se, random_network, test_stream};

#[test]
fn modular_functions() {
    let order = [0, 1, 2];
    let x = double_greedy(&mut FnOracle::new(|s: &NodeSet| s.len() as f64), 3, &order, &mut rng::stream(1, 0)).unwrap();
    assert_eq!(x.members(), vec![0, 1, 2]);
    let x =
        double_greedy(&mut FnOracle::new(|s: &NodeSet| -(s.len() as f64)), 3, &order, &mut rng::stream(1, 0)).unwrap();
    assert!(x.is_empty());
}

#[test]
fn spm_always_keeps_an_isolated_node() {
    let g = Graph::from_edges(1, &[]).unwrap();
    let net = TCNetwork::build(g, DiffusionParams::ic_constant(0.5), 0.5, 0.2, vec![0.8]).unwrap();
    for seed in 0..50 {
        let cfg = RunConfig { l_override: Some(100), ..RunConfig::default() }.with_seed(seed);
        assert_eq!(spm(&net, &cfg).unwrap().members, vec![0]);
    }
}

#[test]
fn forward_algorithms_on_witness() {
    let net = chain(1.0, 0.5, 0.25, 0.6);
    let table = ExactTable::build(&net).unwrap();
    let (_, opt) = table.optimum();
    assert_eq!(opt, 0.75);
    for run in [spm, rpm] {
        let mut values = Vec::new();
        for seed in 0..200 {
            let cfg = RunConfig { l_override: Some(10_000), ..RunConfig::default() }.with_seed(seed);
            let f = table.profit(mask_of(&run(&net, &cfg).unwrap().members));
            assert!(f >= 0.0);
            values.push(f);
        }
        assert!(mean_se(&values).0 >= 0.1 * opt);
    }
}

#[test]
fn realization_oracle_reuses_its_pool() {
    let net = random_network(&mut test_stream(11), 6..=6, 1 << 12);
    let pool = RealizationSet::generate(&net, 500, 3, 1 << 24).unwrap();
    let mut oracle = RealizationOracle::new(&pool, 0.0);
    let s = NodeSet::from_members(6, &[0, 2]);
    let a = oracle.value(&s).unwrap();
    assert_eq!(a, oracle.value(&s).unwrap());
    assert!(std::ptr::eq(oracle.pool(), &pool));
    assert!((oracle.value(&NodeSet::full(6)).unwrap() - net.full_profit()).abs() < 1e-12);
}

#[test]
fn rpm_pool_mean_is_unbiased() {
    let net = random_network(&mut test_stream(12), 5..=6, 1 << 12);
    let seeds: Vec<NodeId> = vec![0, 3];
    let exact = tcpm::diffusion::exact::exact_profit(&net, &seeds).unwrap();
    let values: Vec<f64> = (0..400)
        .map(|i| RealizationSet::generate(&net, 50, i, 1 << 24).unwrap().estimate(&seeds).mean_profit)
        .collect();
    let (mean, se) = mean_se(&values);
    assert!((mean - exact).abs() <= 3.0 * se + 1e-12, "{mean} vs {exact}");
}

#[test]
fn rpm_refuses_over_budget() {
    let net = random_network(&mut test_stream(13), 6..=6, 1 << 12);
    let cfg = RunConfig { l_override: Some(1_000_000), memory_budget: 1 << 10, ..RunConfig::default() };
    assert!(matches!(rpm(&net, &cfg), Err(tcpm::Error::MemoryBudget { .. })));
}

#[test]
fn ra_t_respects_the_cap() {
    let net = random_network(&mut test_stream(14), 8..=8, 1 << 12);
    let cfg = RunConfig { max_ra: Some(50), probe_count: Some(10), ..RunConfig::default() };
    let out = ra_t(&net, &cfg).unwrap();
    assert!(out.details["delta1"].max(out.details["delta2"]) > 50.0);
    assert_eq!(out.details["l"], 50.0);
    assert_eq!(out.samples.ra_sets, 60);
}

#[test]
fn ra_s_doubling_schedule() {
    let net = random_network(&mut test_stream(15), 8..=8, 1 << 12);
    let cfg = RunConfig { plateau_pct: 0.0, epsilon3: 1e-6, ..RunConfig::default() };
    let params = solve_ras_params(8, 8.0, 0.4, net.discount_ratio(), 5, 1e-6).unwrap();
    for seed in 0..10 {
        let (out, trace, stop) = ra_s_traced(&net, &cfg.clone().with_seed(seed)).unwrap();
        let start = params.delta2_star.ceil() as u64;
        for (i, it) in trace.iter().enumerate() {
            assert_eq!(it.ra_sets, start << i);
        }
        let last = trace.last().unwrap();
        match stop {
            RasStop::Threshold => {
                assert!(last.ra_sets as f64 >= params.delta1_star);
                assert!(last.check.is_none());
            }
            RasStop::Verified => assert!(last.objective <= (1.0 + 1e-6) * last.check.unwrap()),
            other => panic!("unexpected stop {other:?}"),
        }
        assert!(trace[..trace.len() - 1].iter().all(|t| (t.ra_sets as f64) < params.delta1_star));
        assert_eq!(out.details["iterations"], trace.len() as f64);
    }
}

#[test]
fn ra_s_plateau_and_cap() {
    let net = random_network(&mut test_stream(16), 8..=8, 1 << 12);
    let (_, trace, stop) =
        ra_s_traced(&net, &RunConfig { plateau_pct: 100.0, epsilon3: 1e-9, ..RunConfig::default() }).unwrap();
    assert!(matches!(stop, RasStop::Plateau | RasStop::Verified));
    assert!(trace.len() <= 2);
    // capping at the starting size ends the run on its first pass
    let start = out_start(&net);
    let (out, trace, stop) = ra_s_traced(&net, &RunConfig { max_ra: Some(start), ..RunConfig::default() }).unwrap();
    assert_eq!(stop, RasStop::Cap);
    assert_eq!(trace.len(), 1);
    assert_eq!(out.details["l"], start as f64);
}

fn out_start(net: &TCNetwork) -> u64 {
    let cfg = RunConfig::default();
    solve_ras_params(net.node_count(), cfg.big_n(net), cfg.epsilon, net.discount_ratio(), cfg.k, cfg.epsilon3)
        .unwrap()
        .delta2_star
        .ceil() as u64
}

#[test]
fn ra_algorithms_do_not_depend_on_order() {
    let mut r = test_stream(17);
    for _ in 0..4 {
        let net = random_network(&mut r, 6..=9, 1 << 13);
        let n = net.node_count() as NodeId;
        let table = ExactTable::build(&net).unwrap();
        let (_, opt) = table.optimum();
        let orders: [Vec<NodeId>; 3] =
            [(0..n).collect(), (0..n).rev().collect(), (0..n).map(|v| (v * 5 + 2) % n).collect()];
        for order in orders {
            let mut perm = order.clone();
            perm.sort_unstable();
            if perm != (0..n).collect::<Vec<_>>() {
                continue;
            }
            let values: Vec<f64> = (0..100)
                .map(|seed| {
                    let cfg = RunConfig { order: Some(order.clone()), ..RunConfig::default() }.with_seed(seed);
                    table.profit(mask_of(&ra_t(&net, &cfg).unwrap().members))
                })
                .collect();
            assert!(mean_se(&values).0 >= 0.1 * opt);
        }
    }
}

#[test]
fn bad_configs_are_rejected() {
    let net = chain(0.5, 0.5, 0.25, 0.9);
    for eps in [0.0, 0.5, 0.7] {
        assert!(spm(&net, &RunConfig { epsilon: eps, ..RunConfig::default() }).is_err());
    }
    assert!(ra_t(&net, &RunConfig { order: Some(vec![0, 0]), ..RunConfig::default() }).is_err());
    assert!(ra_t(&net, &RunConfig { order: Some(vec![1]), ..RunConfig::default() }).is_err());
}
