//! Heuristic baselines: influence-maximizing seeds swept over sizes, and
//! highest out-degree nodes at random sizes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::diffusion::{estimate_profit_simulation, ProfitEstimate};
use crate::error::{Error, Result};
use crate::network::{NodeId, TCNetwork};
use crate::optimize::{Algorithm, SeedSet};
use crate::rng;
use crate::sampling::{self, RACollection};

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    /// MaxInf tries sizes `⌈n·i/sweep_points⌉` for `i = 1..=sweep_points`.
    pub sweep_points: usize,
    /// HighDegree repetitions.
    pub trials: usize,
    /// Simulations per candidate evaluation.
    pub eval_simulations: u64,
    /// MaxInf evaluates only this size when set.
    pub fixed_size: Option<usize>,
    /// Epsilon and N for sizing the MaxInf RA collection (`⌈δ₂⌉`, `ε₂ = ε`).
    pub epsilon: f64,
    pub big_n: Option<f64>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            sweep_points: 50,
            trials: 100,
            eval_simulations: 10_000,
            fixed_size: None,
            epsilon: 0.4,
            big_n: None,
        }
    }
}

impl BaselineConfig {
    fn check(&self) -> Result<()> {
        if self.sweep_points == 0 || self.trials == 0 || self.eval_simulations == 0 || self.fixed_size == Some(0) {
            return Err(Error::Parameter("baseline counts must be positive".into()));
        }
        Ok(())
    }
}

/// Greedy maximum coverage over `coll`: the first `limit` picks, each the
/// node covering the most not-yet-covered sets (ties to the smaller id).
pub fn greedy_max_coverage(coll: &RACollection, limit: usize) -> Vec<NodeId> {
    let n = coll.node_count();
    let mut covered = vec![false; coll.len()];
    let mut taken = vec![false; n];
    let mut heap: BinaryHeap<(usize, Reverse<NodeId>)> =
        (0..n as NodeId).map(|v| (coll.sets_containing(v).len(), Reverse(v))).collect();
    let mut picks = Vec::with_capacity(limit.min(n));
    while picks.len() < limit {
        let Some((stale, Reverse(v))) = heap.pop() else { break };
        if taken[v as usize] {
            continue;
        }
        let gain = coll.sets_containing(v).iter().filter(|&&i| !covered[i as usize]).count();
        if gain < stale {
            heap.push((gain, Reverse(v)));
            continue;
        }
        taken[v as usize] = true;
        for &i in coll.sets_containing(v) {
            covered[i as usize] = true;
        }
        picks.push(v);
    }
    picks
}

fn sweep_sizes(n: usize, points: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = (1..=points).map(|i| (n * i).div_ceil(points).max(1)).collect();
    sizes.dedup();
    sizes
}

/// Seeds chosen for spread alone, at several sizes; the size with the best
/// simulated profit wins.
pub fn max_inf(net: &TCNetwork, cfg: &BaselineConfig, seed: u64) -> Result<SeedSet> {
    cfg.check()?;
    let n = net.node_count();
    let big_n = cfg.big_n.unwrap_or((n as f64).max(2.0));
    let l = sampling::delta2(big_n, cfg.epsilon, net.discount_ratio())?.ceil() as u64;
    let coll = RACollection::generate(net, l, rng::derive(seed, rng::TAG_RA_SETS));
    let sizes = match cfg.fixed_size {
        Some(s) => vec![s.min(n)],
        None => sweep_sizes(n, cfg.sweep_points),
    };
    let picks = greedy_max_coverage(&coll, *sizes.iter().max().unwrap());

    let eval_key = rng::derive(seed, rng::TAG_EVAL);
    let mut best: Option<(usize, ProfitEstimate)> = None;
    for (i, &s) in sizes.iter().enumerate() {
        let est = estimate_profit_simulation(net, &picks[..s], cfg.eval_simulations, rng::derive(eval_key, i as u64));
        if best.is_none_or(|(_, b)| est.mean_profit > b.mean_profit) {
            best = Some((s, est));
        }
    }
    let (size, est) = best.unwrap();
    let mut members = picks[..size].to_vec();
    members.sort_unstable();
    let mut out = SeedSet::new(members, Algorithm::MaxInf);
    out.profit_estimate = Some(est);
    out.samples.ra_sets = l;
    out.samples.simulations = cfg.eval_simulations * sizes.len() as u64;
    out.detail("l", l as f64);
    out.detail("sizes_tried", sizes.len() as f64);
    Ok(out)
}

/// Nodes by out-degree, highest first, ties to the smaller id.
pub fn degree_order(net: &TCNetwork) -> Vec<NodeId> {
    let g = net.graph();
    let mut order: Vec<NodeId> = (0..net.node_count() as NodeId).collect();
    order.sort_by_key(|&v| (Reverse(g.out_degree(v)), v));
    order
}

/// Random sizes, top out-degree nodes, best simulated profit kept.
pub fn high_degree(net: &TCNetwork, cfg: &BaselineConfig, seed: u64) -> Result<SeedSet> {
    cfg.check()?;
    let n = net.node_count();
    let order = degree_order(net);
    let mut sizes = rng::stream(rng::derive(seed, rng::TAG_TRIALS), 0);
    let eval_key = rng::derive(seed, rng::TAG_EVAL);
    let mut best: Option<(usize, ProfitEstimate)> = None;
    for trial in 0..cfg.trials {
        let s = sizes.random_range(1..=n);
        let est =
            estimate_profit_simulation(net, &order[..s], cfg.eval_simulations, rng::derive(eval_key, trial as u64));
        if best.is_none_or(|(_, b)| est.mean_profit > b.mean_profit) {
            best = Some((s, est));
        }
    }
    let (size, est) = best.unwrap();
    let mut members = order[..size].to_vec();
    members.sort_unstable();
    let mut out = SeedSet::new(members, Algorithm::HighDegree);
    out.profit_estimate = Some(est);
    out.samples.simulations = cfg.eval_simulations * cfg.trials as u64;
    out.detail("trials", cfg.trials as f64);
    Ok(out)
}
