//! Exact `π(S)` and `f(S)` by enumerating every realization.
//!
//! Only edges into adopter-eligible nodes matter. Under IC each such edge
//! with `0 < p < 1` is a two-way choice and edges with `p = 1` are always
//! live. Under LT each eligible node with in-edges picks one in-neighbor or
//! none. The number of outcomes is the product of the choice counts, so this
//! is only usable on tiny instances; larger inputs are refused, never
//! sampled.

use crate::error::{Error, Result};
use crate::network::{NodeId, TCNetwork};

/// Largest number of probabilistic IC edges enumerated.
pub const MAX_IC_EDGES: usize = 25;
/// Largest number of LT outcomes enumerated.
pub const MAX_LT_OUTCOMES: u64 = 10_000_000;
/// Largest node count for [`ExactTable`].
pub const MAX_TABLE_NODES: usize = 20;
/// Cap on `outcomes * 2^n` work for [`ExactTable`].
pub const MAX_TABLE_WORK: u64 = 1 << 34;

struct Factor {
    /// (probability, live edge) per choice; `None` means no edge.
    choices: Vec<(f64, Option<(NodeId, NodeId)>)>,
}

struct Outcomes {
    n: usize,
    fixed: Vec<(NodeId, NodeId)>,
    factors: Vec<Factor>,
    count: u64,
}

impl Outcomes {
    fn new(net: &TCNetwork) -> Result<Self> {
        let g = net.graph();
        let mut fixed = Vec::new();
        let mut factors = Vec::new();
        for v in 0..net.node_count() as NodeId {
            if !net.adopter_eligible(v) || g.in_degree(v) == 0 {
                continue;
            }
            let nbrs = g.in_neighbors(v);
            let probs = net.in_probs(v);
            if net.model().is_ic() {
                for (&u, &p) in nbrs.iter().zip(probs) {
                    if p >= 1.0 {
                        fixed.push((u, v));
                    } else if p > 0.0 {
                        factors.push(Factor { choices: vec![(p, Some((u, v))), (1.0 - p, None)] });
                    }
                }
            } else {
                let mut choices: Vec<_> =
                    nbrs.iter().zip(probs).filter(|(_, &w)| w > 0.0).map(|(&u, &w)| (w, Some((u, v)))).collect();
                let rest = 1.0 - probs.iter().sum::<f64>();
                if rest > 1e-12 {
                    choices.push((rest, None));
                }
                if choices.len() == 1 && choices[0].1.is_some() {
                    fixed.push(choices[0].1.unwrap());
                } else {
                    factors.push(Factor { choices });
                }
            }
        }
        let count = if net.model().is_ic() {
            if factors.len() > MAX_IC_EDGES {
                return Err(Error::TooLarge(format!("{} probabilistic edges (limit {MAX_IC_EDGES})", factors.len())));
            }
            1u64 << factors.len()
        } else {
            let mut c: u64 = 1;
            for f in &factors {
                c = c.saturating_mul(f.choices.len() as u64);
                if c > MAX_LT_OUTCOMES {
                    return Err(Error::TooLarge(format!("more than {MAX_LT_OUTCOMES} LT outcomes")));
                }
            }
            c
        };
        Ok(Outcomes { n: net.node_count(), fixed, factors, count })
    }

    /// Calls `visit(prob, out_adjacency)` once per outcome.
    fn for_each(&self, mut visit: impl FnMut(f64, &[Vec<NodeId>])) {
        let mut digits = vec![0usize; self.factors.len()];
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); self.n];
        loop {
            for a in adj.iter_mut() {
                a.clear();
            }
            let mut prob = 1.0;
            for &(u, v) in &self.fixed {
                adj[u as usize].push(v);
            }
            for (f, &d) in self.factors.iter().zip(&digits) {
                let (p, e) = f.choices[d];
                prob *= p;
                if let Some((u, v)) = e {
                    adj[u as usize].push(v);
                }
            }
            visit(prob, &adj);

            // odometer increment
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return;
                }
                digits[i] += 1;
                if digits[i] < self.factors[i].choices.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

/// Number of realizations the exact oracle would enumerate for `net`.
pub fn outcome_count(net: &TCNetwork) -> Result<u64> {
    Outcomes::new(net).map(|o| o.count)
}

/// Exact expected number of adopters `π(S)`.
pub fn exact_spread(net: &TCNetwork, seeds: &[NodeId]) -> Result<f64> {
    let outcomes = Outcomes::new(net)?;
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let mut seen = vec![false; net.node_count()];
    let mut queue = Vec::new();
    let mut total = 0.0;
    outcomes.for_each(|prob, adj| {
        queue.clear();
        for &s in seeds {
            if !seen[s as usize] {
                seen[s as usize] = true;
                queue.push(s);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push(v);
                }
            }
        }
        for &v in &queue {
            seen[v as usize] = false;
        }
        total += prob * queue.len() as f64;
    });
    Ok(total)
}

/// Exact profit `f(S) = P·π(S) − C·|S|`.
pub fn exact_profit(net: &TCNetwork, seeds: &[NodeId]) -> Result<f64> {
    Ok(net.profit(exact_spread(net, seeds)?, seeds.len()))
}

/// `π(S)` for every subset of a tiny network, indexed by bitmask
/// (bit `v` set iff node `v` is in `S`).
#[derive(Debug, Clone)]
pub struct ExactTable {
    n: usize,
    price: f64,
    coupon: f64,
    spread: Vec<f64>,
}

impl ExactTable {
    pub fn build(net: &TCNetwork) -> Result<Self> {
        let n = net.node_count();
        if n > MAX_TABLE_NODES {
            return Err(Error::TooLarge(format!("{n} nodes (table limit {MAX_TABLE_NODES})")));
        }
        let outcomes = Outcomes::new(net)?;
        let subsets = 1usize << n;
        if outcomes.count.saturating_mul(subsets as u64) > MAX_TABLE_WORK {
            return Err(Error::TooLarge(format!("{} outcomes over {subsets} subsets", outcomes.count)));
        }
        let mut spread = vec![0.0; subsets];
        let mut reach = vec![0u32; n];
        let mut cover = vec![0u32; subsets];
        let mut stack = Vec::new();
        outcomes.for_each(|prob, adj| {
            for (s, r) in reach.iter_mut().enumerate() {
                let mut mask = 1u32 << s;
                stack.clear();
                stack.push(s as NodeId);
                while let Some(u) = stack.pop() {
                    for &v in &adj[u as usize] {
                        if mask & (1 << v) == 0 {
                            mask |= 1 << v;
                            stack.push(v);
                        }
                    }
                }
                *r = mask;
            }
            for set in 1..subsets {
                let low = set.trailing_zeros() as usize;
                cover[set] = cover[set & (set - 1)] | reach[low];
                spread[set] += prob * cover[set].count_ones() as f64;
            }
        });
        Ok(ExactTable { n, price: net.price(), coupon: net.coupon(), spread })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn spread(&self, mask: u32) -> f64 {
        self.spread[mask as usize]
    }

    pub fn profit(&self, mask: u32) -> f64 {
        self.price * self.spread[mask as usize] - self.coupon * mask.count_ones() as f64
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    /// Best subset by exhaustive scan; ties go to the smallest mask.
    pub fn optimum(&self) -> (u32, f64) {
        let mut best = (0u32, self.profit(0));
        for mask in 1..=self.full_mask() {
            let f = self.profit(mask);
            if f > best.1 {
                best = (mask, f);
            }
        }
        best
    }
}

pub fn mask_of(nodes: &[NodeId]) -> u32 {
    nodes.iter().fold(0u32, |m, &v| m | (1 << v))
}

pub fn nodes_of(mask: u32) -> Vec<NodeId> {
    (0..32).filter(|&v| mask & (1 << v) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{DiffusionParams, Graph};

    fn chain(p: f64, second: f64) -> TCNetwork {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        TCNetwork::build(g, DiffusionParams::ic_constant(p), 0.5, 0.25, vec![0.9, second]).unwrap()
    }

    #[test]
    fn half_probability_chain() {
        let net = chain(0.5, 0.9);
        assert_eq!(exact_spread(&net, &[0]).unwrap(), 1.5);
        assert_eq!(exact_profit(&net, &[0]).unwrap(), 0.5);
        assert_eq!(exact_profit(&net, &[]).unwrap(), 0.0);
    }

    #[test]
    fn non_monotone_witness() {
        // v2 adopts through v1: f({v1}) = 2P - C > f({v1,v2}) = 2P - 2C
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        for c in [0.05, 0.25, 0.45] {
            let net = TCNetwork::build(g.clone(), DiffusionParams::ic_constant(1.0), 0.5, c, vec![0.9, 0.6]).unwrap();
            let one = exact_profit(&net, &[0]).unwrap();
            let both = exact_profit(&net, &[0, 1]).unwrap();
            assert!((one - (1.0 - c)).abs() < 1e-15);
            assert!((both - (1.0 - 2.0 * c)).abs() < 1e-15);
            assert!(one > both);
        }
        // with v2 below the price it only adopts as a seed
        let net = TCNetwork::build(g, DiffusionParams::ic_constant(1.0), 0.5, 0.25, vec![0.9, 0.3]).unwrap();
        assert_eq!(exact_profit(&net, &[0]).unwrap(), 0.25);
        assert_eq!(exact_profit(&net, &[0, 1]).unwrap(), 0.5);
    }

    #[test]
    fn table_agrees_with_single_queries() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        for params in [DiffusionParams::ic_constant(0.4), DiffusionParams::linear_threshold()] {
            let net = TCNetwork::build(g.clone(), params, 0.5, 0.2, vec![0.9, 0.6, 0.4, 0.8]).unwrap();
            let table = ExactTable::build(&net).unwrap();
            for mask in 0..16u32 {
                let direct = exact_profit(&net, &nodes_of(mask)).unwrap();
                assert!((table.profit(mask) - direct).abs() < 1e-12);
            }
            assert!((table.profit(table.full_mask()) - net.full_profit()).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_large_instances() {
        let n = 30;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(n as usize, &edges).unwrap();
        let net = TCNetwork::build(g, DiffusionParams::ic_constant(0.5), 0.5, 0.1, vec![0.9; n as usize]).unwrap();
        assert!(matches!(exact_profit(&net, &[0]), Err(Error::TooLarge(_))));
        assert!(matches!(ExactTable::build(&net), Err(Error::TooLarge(_))));
    }
}
