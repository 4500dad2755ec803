#![allow(dead_code)]

use rand::Rng;
use tcpm::diffusion::exact::outcome_count;
use tcpm::network::{generate_intrinsics, DiffusionParams, Graph, Model, NodeId, TCNetwork};
use tcpm::rng::{self, Stream};

/// Two nodes, one edge v1 -> v2.
pub fn chain(p: f64, price: f64, coupon: f64, second: f64) -> TCNetwork {
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    TCNetwork::build(g, DiffusionParams::ic_constant(p), price, coupon, vec![0.9, second]).unwrap()
}

/// A random small network whose exact table stays cheap: at most
/// `max_outcomes` realizations to enumerate.
pub fn random_network(r: &mut Stream, nodes: std::ops::RangeInclusive<usize>, max_outcomes: u64) -> TCNetwork {
    loop {
        let n = r.random_range(nodes.clone());
        let params = match r.random_range(0..3) {
            0 => DiffusionParams::ic_constant(r.random_range(0.1..0.9)),
            1 => DiffusionParams::ic_weighted(),
            _ => DiffusionParams::linear_threshold(),
        };
        let m = r.random_range(n..=2 * n);
        let edges: Vec<(NodeId, NodeId)> =
            (0..m).map(|_| (r.random_range(0..n as NodeId), r.random_range(0..n as NodeId))).collect();
        let price = r.random_range(0.3..0.7);
        let coupon = price * r.random_range(0.2..0.6);
        let intrinsic = generate_intrinsics(n, price, coupon, r.random()).unwrap();
        let g = Graph::from_edges(n, &edges).unwrap();
        let Ok(net) = TCNetwork::build(g, params, price, coupon, intrinsic) else { continue };
        if matches!(outcome_count(&net), Ok(c) if c <= max_outcomes) {
            return net;
        }
    }
}

pub fn test_stream(seed: u64) -> Stream {
    rng::stream(seed, 0)
}

pub fn model_name(net: &TCNetwork) -> &'static str {
    match net.model() {
        Model::IcConstant => "ic-cp",
        Model::IcWeighted => "ic-wc",
        Model::LinearThreshold => "lt",
    }
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean and standard error of an indicator given hit count and trials.
pub fn bernoulli_mean_se(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}
