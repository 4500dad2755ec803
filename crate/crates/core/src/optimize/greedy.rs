use rand::Rng;

use crate::diffusion::exact::ExactTable;
use crate::diffusion::{estimate_profit_simulation, RealizationSet};
use crate::error::Result;
use crate::network::{NodeId, TCNetwork};
use crate::rng::{self, Stream};
use crate::sampling::RACollection;

/// Subset of `0..n` with O(1) membership and insertion/removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    mask: Vec<bool>,
    len: usize,
}

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet { mask: vec![false; n], len: 0 }
    }

    pub fn full(n: usize) -> Self {
        NodeSet { mask: vec![true; n], len: n }
    }

    pub fn from_members(n: usize, members: &[NodeId]) -> Self {
        let mut s = Self::empty(n);
        for &v in members {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.mask[v as usize]
    }

    pub fn insert(&mut self, v: NodeId) {
        if !self.mask[v as usize] {
            self.mask[v as usize] = true;
            self.len += 1;
        }
    }

    pub fn remove(&mut self, v: NodeId) {
        if self.mask[v as usize] {
            self.mask[v as usize] = false;
            self.len -= 1;
        }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Members in ascending order.
    pub fn members(&self) -> Vec<NodeId> {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v as NodeId).collect()
    }

    /// Bitmask form for universes of at most 32 nodes.
    pub fn bits(&self) -> u32 {
        debug_assert!(self.mask.len() <= 32);
        self.mask.iter().enumerate().fold(0, |m, (v, &b)| if b { m | (1 << v) } else { m })
    }
}

/// Which estimator backs an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Exact,
    /// Fresh `l` simulations per evaluated set.
    Simulation(u64),
    /// A fixed pool of `l` realizations.
    Realization(u64),
    /// A fixed collection of `l` RA sets.
    RaSets(u64),
}

/// A set function queried by double greedy.
///
/// `marginals` returns `(h(X ∪ {v}) − h(X), h(Y \ {v}) − h(Y))`; the default
/// makes the four evaluations literally. `commit` tells the oracle which way
/// `v` went, for oracles that track X and Y incrementally.
pub trait Oracle {
    fn kind(&self) -> OracleKind;

    fn value(&mut self, set: &NodeSet) -> Result<f64>;

    /// Offset added to both marginals before clamping; zero for oracles that
    /// are exact for the function being maximized.
    fn shift(&self) -> f64 {
        0.0
    }

    fn marginals(&mut self, x: &mut NodeSet, y: &mut NodeSet, v: NodeId) -> Result<(f64, f64)> {
        let hx = self.value(x)?;
        x.insert(v);
        let hxv = self.value(x)?;
        x.remove(v);
        let hy = self.value(y)?;
        y.remove(v);
        let hyv = self.value(y)?;
        y.insert(v);
        Ok((hxv - hx, hyv - hy))
    }

    fn commit(&mut self, _v: NodeId, _included: bool) {}
}

/// Randomized double greedy over the nodes in `order`.
///
/// Starting from `X = ∅` and `Y = order`, each node is added to `X` with
/// probability `a'/(a'+b')` (always when both clamped marginals are zero) and
/// otherwise removed from `Y`. The oracle's shift is added to both marginals
/// before clamping.
pub fn double_greedy<O: Oracle + ?Sized>(
    oracle: &mut O,
    universe: usize,
    order: &[NodeId],
    rng: &mut Stream,
) -> Result<NodeSet> {
    let mut x = NodeSet::empty(universe);
    let mut y = NodeSet::from_members(universe, order);
    let shift = oracle.shift();
    for &v in order {
        let (a, b) = oracle.marginals(&mut x, &mut y, v)?;
        let a = (a + shift).max(0.0);
        let b = (b + shift).max(0.0);
        let u: f64 = rng.random();
        let include = a + b == 0.0 || u < a / (a + b);
        if include {
            x.insert(v);
        } else {
            y.remove(v);
        }
        oracle.commit(v, include);
    }
    Ok(x)
}

/// Exact profit from a precomputed table.
pub struct ExactOracle<'a> {
    table: &'a ExactTable,
}

impl<'a> ExactOracle<'a> {
    pub fn new(table: &'a ExactTable) -> Self {
        ExactOracle { table }
    }
}

impl Oracle for ExactOracle<'_> {
    fn kind(&self) -> OracleKind {
        OracleKind::Exact
    }

    fn value(&mut self, set: &NodeSet) -> Result<f64> {
        Ok(self.table.profit(set.bits()))
    }
}

/// Wraps an arbitrary set function, with an optional shift.
pub struct FnOracle<F> {
    f: F,
    shift: f64,
}

impl<F: FnMut(&NodeSet) -> f64> FnOracle<F> {
    pub fn new(f: F) -> Self {
        FnOracle { f, shift: 0.0 }
    }

    pub fn with_shift(f: F, shift: f64) -> Self {
        FnOracle { f, shift }
    }
}

impl<F: FnMut(&NodeSet) -> f64> Oracle for FnOracle<F> {
    fn kind(&self) -> OracleKind {
        OracleKind::Exact
    }

    fn value(&mut self, set: &NodeSet) -> Result<f64> {
        Ok((self.f)(set))
    }

    fn shift(&self) -> f64 {
        self.shift
    }
}

/// `f̃_l`: every evaluation runs `l` fresh simulations.
pub struct SimulationOracle<'a> {
    net: &'a TCNetwork,
    l: u64,
    seed: u64,
    calls: u64,
    simulations: u64,
    shift: f64,
}

impl<'a> SimulationOracle<'a> {
    pub fn new(net: &'a TCNetwork, l: u64, seed: u64, shift: f64) -> Self {
        SimulationOracle { net, l, seed, calls: 0, simulations: 0, shift }
    }

    pub fn simulations(&self) -> u64 {
        self.simulations
    }
}

impl Oracle for SimulationOracle<'_> {
    fn kind(&self) -> OracleKind {
        OracleKind::Simulation(self.l)
    }

    fn value(&mut self, set: &NodeSet) -> Result<f64> {
        let seed = rng::derive(self.seed, self.calls);
        self.calls += 1;
        if set.is_empty() {
            return Ok(0.0);
        }
        self.simulations += self.l;
        Ok(estimate_profit_simulation(self.net, &set.members(), self.l, seed).mean_profit)
    }

    fn shift(&self) -> f64 {
        self.shift
    }
}

/// `f̂_G`: every evaluation replays the same realization pool.
pub struct RealizationOracle<'a> {
    pool: &'a RealizationSet,
    shift: f64,
}

impl<'a> RealizationOracle<'a> {
    pub fn new(pool: &'a RealizationSet, shift: f64) -> Self {
        RealizationOracle { pool, shift }
    }

    pub fn pool(&self) -> &'a RealizationSet {
        self.pool
    }
}

impl Oracle for RealizationOracle<'_> {
    fn kind(&self) -> OracleKind {
        OracleKind::Realization(self.pool.len() as u64)
    }

    fn value(&mut self, set: &NodeSet) -> Result<f64> {
        Ok(self.pool.estimate(&set.members()).mean_profit)
    }

    fn shift(&self) -> f64 {
        self.shift
    }
}

/// `F(R, S)` over a fixed RA collection.
///
/// Marginals come from per-set counters: how many members of each set are
/// in `X`, and how many are still in `Y`. A set adds to `a` when it has no
/// member in `X`, and subtracts from `b` when `v` is its last member in `Y`.
/// A full greedy pass therefore costs `O(Σ|R|)`.
pub struct CoverageOracle<'a> {
    coll: &'a RACollection,
    in_x: Vec<u32>,
    in_y: Vec<u32>,
}

impl<'a> CoverageOracle<'a> {
    /// Counters start at `X = ∅`, `Y = V`.
    pub fn new(coll: &'a RACollection) -> Self {
        let in_y = coll.iter().map(|s| s.len() as u32).collect();
        CoverageOracle { coll, in_x: vec![0; coll.len()], in_y }
    }

    pub fn collection(&self) -> &'a RACollection {
        self.coll
    }

    fn unit(&self) -> f64 {
        self.coll.price() * self.coll.node_count() as f64 / self.coll.len().max(1) as f64
    }
}

impl Oracle for CoverageOracle<'_> {
    fn kind(&self) -> OracleKind {
        OracleKind::RaSets(self.coll.len() as u64)
    }

    fn value(&mut self, set: &NodeSet) -> Result<f64> {
        Ok(self.coll.estimate(set.mask()))
    }

    fn marginals(&mut self, _x: &mut NodeSet, _y: &mut NodeSet, v: NodeId) -> Result<(f64, f64)> {
        let mut gain = 0usize;
        let mut loss = 0usize;
        for &i in self.coll.sets_containing(v) {
            let i = i as usize;
            if self.in_x[i] == 0 {
                gain += 1;
            }
            if self.in_y[i] == 1 {
                loss += 1;
            }
        }
        let unit = self.unit();
        let c = self.coll.coupon();
        Ok((unit * gain as f64 - c, c - unit * loss as f64))
    }

    fn commit(&mut self, v: NodeId, included: bool) {
        let counters = if included { &mut self.in_x } else { &mut self.in_y };
        for &i in self.coll.sets_containing(v) {
            if included {
                counters[i as usize] += 1;
            } else {
                counters[i as usize] -= 1;
            }
        }
    }
}
