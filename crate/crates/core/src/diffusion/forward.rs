use rand::Rng;

use crate::exec::{self, ExecMode};
use crate::network::{NodeId, TCNetwork};
use crate::rng::{self, Stream};

use super::{EstimatorKind, ProfitEstimate};

const SIM_BLOCK: usize = 1024;

/// Reusable buffers for [`simulate_once`].
#[derive(Debug, Clone)]
pub struct SimScratch {
    adopted: Vec<bool>,
    touched: Vec<NodeId>,
    queue: Vec<NodeId>,
    weight: Vec<f64>,
    threshold: Vec<f64>,
}

impl SimScratch {
    pub fn new(n: usize) -> Self {
        SimScratch {
            adopted: vec![false; n],
            touched: Vec::new(),
            queue: Vec::new(),
            weight: vec![0.0; n],
            threshold: vec![-1.0; n],
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.adopted[v as usize] = false;
            self.weight[v as usize] = 0.0;
            self.threshold[v as usize] = -1.0;
        }
        self.touched.clear();
        self.queue.clear();
    }
}

/// Runs the T-C process once from `seeds` and returns the number of adopters.
///
/// Seeds adopt unconditionally. A non-seed adopts only if it is activated
/// by an adopting in-neighbor and `I_v >= P`. Under IC each new adopter gets
/// one attempt per out-edge; under LT each node draws a fresh threshold the
/// first time any in-neighbor adopts.
pub fn simulate_once(net: &TCNetwork, seeds: &[NodeId], rng: &mut Stream, scratch: &mut SimScratch) -> usize {
    scratch.reset();
    for &s in seeds {
        if !scratch.adopted[s as usize] {
            scratch.adopted[s as usize] = true;
            scratch.touched.push(s);
            scratch.queue.push(s);
        }
    }
    let graph = net.graph();
    let lt = !net.model().is_ic();
    let mut head = 0;
    while head < scratch.queue.len() {
        let u = scratch.queue[head];
        head += 1;
        for (&v, &p) in graph.out_neighbors(u).iter().zip(net.out_probs(u)) {
            let vi = v as usize;
            if scratch.adopted[vi] || !net.adopter_eligible(v) {
                continue;
            }
            let activated = if lt {
                if scratch.threshold[vi] < 0.0 {
                    scratch.threshold[vi] = rng.random::<f64>();
                    // weight/threshold are only reset for touched nodes
                    scratch.touched.push(v);
                }
                scratch.weight[vi] += p;
                scratch.weight[vi] >= scratch.threshold[vi]
            } else {
                rng.random::<f64>() < p
            };
            if activated {
                scratch.adopted[vi] = true;
                if !lt {
                    scratch.touched.push(v);
                }
                scratch.queue.push(v);
            }
        }
    }
    scratch.queue.len()
}

/// Sample mean of `l` independent simulations, reproducible for a fixed
/// `seed` regardless of thread count.
pub fn estimate_profit_simulation(net: &TCNetwork, seeds: &[NodeId], l: u64, seed: u64) -> ProfitEstimate {
    estimate_profit_simulation_with(net, seeds, l, seed, ExecMode::default())
}

pub fn estimate_profit_simulation_with(
    net: &TCNetwork,
    seeds: &[NodeId],
    l: u64,
    seed: u64,
    mode: ExecMode,
) -> ProfitEstimate {
    let key = rng::derive(seed, rng::TAG_SIMULATION);
    let parts = exec::map_blocks(mode, l as usize, SIM_BLOCK, |block, range| {
        let mut rng = rng::stream(key, block);
        let mut scratch = SimScratch::new(net.node_count());
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in range {
            let a = simulate_once(net, seeds, &mut rng, &mut scratch) as f64;
            sum += a;
            sum_sq += a * a;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = parts.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    ProfitEstimate::from_sums(net.price(), net.coupon(), seeds.len(), l, sum, sum_sq, EstimatorKind::Simulation)
}
