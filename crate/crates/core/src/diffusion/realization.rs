use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::network::{NodeId, TCNetwork};
use crate::rng::{self, Stream};

use super::{EstimatorKind, ProfitEstimate};

const REAL_BLOCK: usize = 64;
const FORMAT_HEADER: &str = "tcpm-realization";
const FORMAT_VERSION: u32 = 1;

/// One sampled triggering set per node.
///
/// Stored twice: the triggering sets themselves and the forward live-edge
/// lists (`u -> v` whenever `u` is in `T_v`) that replay walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    trig_offsets: Vec<u32>,
    trig: Vec<NodeId>,
    live_offsets: Vec<u32>,
    live: Vec<NodeId>,
}

impl Realization {
    /// Builds a realization from explicit triggering sets.
    pub fn from_triggering_sets(sets: &[Vec<NodeId>]) -> Self {
        let mut trig_offsets = Vec::with_capacity(sets.len() + 1);
        trig_offsets.push(0);
        let mut trig = Vec::new();
        for t in sets {
            trig.extend_from_slice(t);
            trig_offsets.push(trig.len() as u32);
        }
        Self::finish(trig_offsets, trig)
    }

    fn finish(trig_offsets: Vec<u32>, trig: Vec<NodeId>) -> Self {
        let n = trig_offsets.len() - 1;
        let mut live_offsets = vec![0u32; n + 1];
        for &u in &trig {
            live_offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            live_offsets[i + 1] += live_offsets[i];
        }
        let mut cursor = live_offsets.clone();
        let mut live = vec![0; trig.len()];
        for v in 0..n {
            for &u in &trig[trig_offsets[v] as usize..trig_offsets[v + 1] as usize] {
                live[cursor[u as usize] as usize] = v as NodeId;
                cursor[u as usize] += 1;
            }
        }
        Realization { trig_offsets, trig, live_offsets, live }
    }

    pub fn node_count(&self) -> usize {
        self.trig_offsets.len() - 1
    }

    /// `T_v`.
    pub fn triggering_set(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.trig[self.trig_offsets[v] as usize..self.trig_offsets[v + 1] as usize]
    }

    fn live_out(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.live[self.live_offsets[u] as usize..self.live_offsets[u + 1] as usize]
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        4 * (self.trig_offsets.len() + self.trig.len() + self.live_offsets.len() + self.live.len())
    }

    pub(crate) fn estimated_bytes(n: usize, live_edges: f64) -> f64 {
        4.0 * (2.0 * (n as f64 + 1.0) + 2.0 * live_edges)
    }

    /// Writes the line format: a versioned header, the node count, then one
    /// `v: a,b,c` line per node.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{FORMAT_HEADER} {FORMAT_VERSION}")?;
        writeln!(out, "n {}", self.node_count())?;
        for v in 0..self.node_count() as NodeId {
            let members: Vec<String> = self.triggering_set(v).iter().map(|u| u.to_string()).collect();
            writeln!(out, "{v}: {}", members.join(","))?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let bad = |line: usize, msg: &str| Error::Parse { line, message: msg.to_string() };
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let header = header?;
        match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            [FORMAT_HEADER, v] if *v == FORMAT_VERSION.to_string() => {}
            _ => return Err(bad(1, "unsupported realization header")),
        }
        let (_, count) = lines.next().ok_or_else(|| bad(2, "missing node count"))?;
        let n: usize =
            count?.strip_prefix("n ").and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad(2, "bad node count"))?;
        let mut sets = vec![Vec::new(); n];
        let mut seen = 0;
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (v, rest) = line.split_once(':').ok_or_else(|| bad(i + 1, "expected `v: members`"))?;
            let v: usize = v.trim().parse().map_err(|_| bad(i + 1, "bad node id"))?;
            if v >= n {
                return Err(bad(i + 1, "node id out of range"));
            }
            for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let u: NodeId = tok.parse().map_err(|_| bad(i + 1, "bad member id"))?;
                if u as usize >= n {
                    return Err(bad(i + 1, "member id out of range"));
                }
                sets[v].push(u);
            }
            seen += 1;
        }
        if seen != n {
            return Err(Error::Format(format!("expected {n} node lines, found {seen}")));
        }
        Ok(Self::from_triggering_sets(&sets))
    }
}

/// Samples the triggering set of every node. Nodes with `I_v < P` get the
/// empty set; IC includes each in-neighbor independently; LT picks at most
/// one in-neighbor, `u` with probability `w(u,v)`.
pub fn sample_realization(net: &TCNetwork, rng: &mut Stream) -> Realization {
    let n = net.node_count();
    let mut trig_offsets = Vec::with_capacity(n + 1);
    trig_offsets.push(0u32);
    let mut trig = Vec::new();
    for v in 0..n as NodeId {
        sample_triggering_set(net, v, rng, &mut trig);
        trig_offsets.push(trig.len() as u32);
    }
    Realization::finish(trig_offsets, trig)
}

/// Appends a sample of `T_v` to `out`.
#[inline]
pub(crate) fn sample_triggering_set(net: &TCNetwork, v: NodeId, rng: &mut Stream, out: &mut Vec<NodeId>) {
    if !net.adopter_eligible(v) {
        return;
    }
    let nbrs = net.graph().in_neighbors(v);
    if nbrs.is_empty() {
        return;
    }
    let probs = net.in_probs(v);
    if net.model().is_ic() {
        for (&u, &p) in nbrs.iter().zip(probs) {
            if rng.random::<f64>() < p {
                out.push(u);
            }
        }
    } else {
        let mut x = rng.random::<f64>();
        for (&u, &w) in nbrs.iter().zip(probs) {
            if x < w {
                out.push(u);
                return;
            }
            x -= w;
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplayScratch {
    adopted: Vec<bool>,
    queue: Vec<NodeId>,
}

impl ReplayScratch {
    pub fn new(n: usize) -> Self {
        ReplayScratch { adopted: vec![false; n], queue: Vec::new() }
    }
}

/// Number of nodes reachable from `seeds` along live edges (seeds included).
pub fn replay_on_realization(real: &Realization, seeds: &[NodeId], scratch: &mut ReplayScratch) -> usize {
    scratch.queue.clear();
    for &s in seeds {
        if !scratch.adopted[s as usize] {
            scratch.adopted[s as usize] = true;
            scratch.queue.push(s);
        }
    }
    let mut head = 0;
    while head < scratch.queue.len() {
        let u = scratch.queue[head];
        head += 1;
        for &v in real.live_out(u) {
            if !scratch.adopted[v as usize] {
                scratch.adopted[v as usize] = true;
                scratch.queue.push(v);
            }
        }
    }
    for &v in &scratch.queue {
        scratch.adopted[v as usize] = false;
    }
    scratch.queue.len()
}

/// A fixed pool of realizations; every query reuses the same pool.
#[derive(Debug, Clone)]
pub struct RealizationSet {
    reals: Vec<Realization>,
    price: f64,
    coupon: f64,
    mode: ExecMode,
}

impl RealizationSet {
    /// Samples `l` realizations. Refuses up front when the expected size
    /// exceeds `memory_budget` bytes.
    pub fn generate(net: &TCNetwork, l: u64, seed: u64, memory_budget: u64) -> Result<Self> {
        Self::generate_with(net, l, seed, memory_budget, ExecMode::default())
    }

    pub fn generate_with(net: &TCNetwork, l: u64, seed: u64, memory_budget: u64, mode: ExecMode) -> Result<Self> {
        let needed = (l as f64 * Realization::estimated_bytes(net.node_count(), expected_live_edges(net))) as u64;
        if needed > memory_budget {
            return Err(Error::MemoryBudget { needed, budget: memory_budget });
        }
        let key = rng::derive(seed, rng::TAG_REALIZATIONS);
        let blocks = exec::map_blocks(mode, l as usize, REAL_BLOCK, |block, range| {
            let mut rng = rng::stream(key, block);
            range.map(|_| sample_realization(net, &mut rng)).collect::<Vec<_>>()
        });
        Ok(RealizationSet {
            reals: blocks.into_iter().flatten().collect(),
            price: net.price(),
            coupon: net.coupon(),
            mode,
        })
    }

    pub fn len(&self) -> usize {
        self.reals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reals.is_empty()
    }

    pub fn realizations(&self) -> &[Realization] {
        &self.reals
    }

    /// `f̂(S)`: profit averaged over the pool.
    pub fn estimate(&self, seeds: &[NodeId]) -> ProfitEstimate {
        let n = self.reals.first().map_or(0, |r| r.node_count());
        let parts = exec::map_blocks(self.mode, self.reals.len(), 256, |_, range| {
            let mut scratch = ReplayScratch::new(n);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for r in &self.reals[range] {
                let a = replay_on_realization(r, seeds, &mut scratch) as f64;
                sum += a;
                sum_sq += a * a;
            }
            (sum, sum_sq)
        });
        let (sum, sum_sq) = parts.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        ProfitEstimate::from_sums(
            self.price,
            self.coupon,
            seeds.len(),
            self.reals.len() as u64,
            sum,
            sum_sq,
            EstimatorKind::Realization,
        )
    }
}

fn expected_live_edges(net: &TCNetwork) -> f64 {
    (0..net.node_count() as NodeId)
        .filter(|&v| net.adopter_eligible(v))
        .map(|v| net.in_probs(v).iter().sum::<f64>())
        .sum()
}
