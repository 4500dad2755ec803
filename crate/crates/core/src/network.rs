//! Graph ingestion and T-C network construction.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Dense node index.
pub type NodeId = u32;

/// Immutable directed graph in compressed adjacency form, with both
/// directions materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph on nodes `0..n`. Self-loops are dropped and parallel
    /// edges collapsed. Labels default to the ids themselves.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::from_labeled_edges((0..n as u64).collect(), edges)
    }

    fn from_labeled_edges(labels: Vec<u64>, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut list: Vec<(NodeId, NodeId)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::param(format!("edge ({u},{v}) out of range for {n} nodes")));
            }
            if u != v {
                list.push((u, v));
            }
        }
        list.sort_unstable();
        list.dedup();

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v) in &list {
            out_offsets[u as usize + 1] += 1;
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        // `list` is sorted by (u, v) so out lists come out sorted.
        let out_targets = list.iter().map(|&(_, v)| v).collect();
        let mut in_sources = vec![0; list.len()];
        let mut cursor = in_offsets.clone();
        for &(u, v) in &list {
            in_sources[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        Ok(Graph { out_offsets, out_targets, in_offsets, in_sources, labels })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_neighbors(v).len()
    }

    /// Offset of `v`'s first in-edge in the flat in-edge arrays.
    pub(crate) fn in_offset(&self, v: NodeId) -> usize {
        self.in_offsets[v as usize]
    }

    pub(crate) fn out_offset(&self, v: NodeId) -> usize {
        self.out_offsets[v as usize]
    }

    /// Original label of a dense id.
    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Dense id of an original label.
    pub fn id_of(&self, label: u64) -> Option<NodeId> {
        // labels are strictly increasing: ingestion sorts them and pruning
        // keeps the order.
        self.labels.binary_search(&label).ok().map(|i| i as NodeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Subgraph induced by the nodes with `keep[v]`, ids re-densified in
    /// order. Labels carry over.
    fn induced(&self, keep: &[bool]) -> Result<Graph> {
        let mut new_id = vec![NodeId::MAX; self.node_count()];
        let mut labels = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                new_id[v] = labels.len() as NodeId;
                labels.push(self.labels[v]);
            }
        }
        if labels.is_empty() {
            return Err(Error::EmptyFeasibleNetwork);
        }
        let edges: Vec<_> = self
            .edges()
            .filter(|&(u, v)| keep[u as usize] && keep[v as usize])
            .map(|(u, v)| (new_id[u as usize], new_id[v as usize]))
            .collect();
        Graph::from_labeled_edges(labels, &edges)
    }
}

/// Reads a SNAP-style edge list: one `u v` pair per line, `#` comments.
///
/// Ids are re-densified in ascending label order. With `undirected`, every
/// line contributes both directions.
pub fn ingest_edge_list<R: BufRead>(source: R, undirected: bool) -> Result<Graph> {
    let mut raw = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut parts = text.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse { line: i + 1, message: "expected two node ids".into() })?;
            tok.parse::<u64>().map_err(|_| Error::Parse { line: i + 1, message: format!("bad node id {tok:?}") })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::Parse { line: i + 1, message: "expected exactly two node ids".into() });
        }
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    let id = |l: u64| labels.binary_search(&l).unwrap() as NodeId;
    let mut edges = Vec::with_capacity(raw.len() * if undirected { 2 } else { 1 });
    for &(u, v) in &raw {
        edges.push((id(u), id(v)));
        if undirected {
            edges.push((id(v), id(u)));
        }
    }
    Graph::from_labeled_edges(labels, &edges)
}

/// Diffusion model underlying the triggering sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Independent cascade, one constant probability on every edge.
    IcConstant,
    /// Independent cascade, weighted cascade probabilities `1/indeg(v)`.
    IcWeighted,
    /// Linear threshold with weights `1/indeg(v)`.
    LinearThreshold,
}

impl Model {
    pub fn is_ic(self) -> bool {
        !matches!(self, Model::LinearThreshold)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Model::IcConstant => "ic-cp",
            Model::IcWeighted => "ic-wc",
            Model::LinearThreshold => "lt",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ic-cp" => Ok(Model::IcConstant),
            "ic-wc" => Ok(Model::IcWeighted),
            "lt" => Ok(Model::LinearThreshold),
            other => Err(Error::param(format!("unknown model {other:?} (expected ic-cp, ic-wc or lt)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub model: Model,
    /// Edge probability for [`Model::IcConstant`]; ignored otherwise.
    pub ic_probability: f64,
}

impl DiffusionParams {
    pub fn ic_constant(p: f64) -> Self {
        DiffusionParams { model: Model::IcConstant, ic_probability: p }
    }

    pub fn ic_weighted() -> Self {
        DiffusionParams { model: Model::IcWeighted, ic_probability: 0.01 }
    }

    pub fn linear_threshold() -> Self {
        DiffusionParams { model: Model::LinearThreshold, ic_probability: 0.01 }
    }

    fn validate(&self) -> Result<()> {
        if self.model == Model::IcConstant && !(self.ic_probability > 0.0 && self.ic_probability <= 1.0) {
            return Err(Error::param(format!("ic probability {} not in (0,1]", self.ic_probability)));
        }
        Ok(())
    }
}

/// Rounding slack for the pruning predicate, so that intrinsics drawn
/// exactly at `P - C` are retained.
const PRUNE_SLACK: f64 = 1e-12;

/// A graph with price, coupon, intrinsic values and per-edge diffusion
/// probabilities. Nodes that cannot adopt even with a coupon are already
/// removed.
#[derive(Debug, Clone)]
pub struct TCNetwork {
    graph: Graph,
    params: DiffusionParams,
    price: f64,
    coupon: f64,
    intrinsic: Vec<f64>,
    eligible: Vec<bool>,
    in_prob: Vec<f64>,
    out_prob: Vec<f64>,
}

impl TCNetwork {
    /// Validates the inputs, prunes nodes with `price > intrinsic + coupon`
    /// together with their edges, and derives per-edge probabilities on the
    /// remaining graph.
    pub fn build(graph: Graph, params: DiffusionParams, price: f64, coupon: f64, intrinsic: Vec<f64>) -> Result<Self> {
        params.validate()?;
        if !(price > 0.0 && price <= 1.0) {
            return Err(Error::param(format!("price {price} not in (0,1]")));
        }
        if !(coupon >= 0.0 && coupon < price) {
            return Err(Error::param(format!("coupon {coupon} not in [0, price)")));
        }
        if intrinsic.len() != graph.node_count() {
            return Err(Error::param(format!("{} intrinsic values for {} nodes", intrinsic.len(), graph.node_count())));
        }
        if let Some(bad) = intrinsic.iter().find(|x| !x.is_finite()) {
            return Err(Error::param(format!("non-finite intrinsic value {bad}")));
        }

        let keep: Vec<bool> = intrinsic.iter().map(|&iv| price <= iv + coupon + PRUNE_SLACK).collect();
        let (graph, intrinsic) = if keep.iter().all(|&k| k) {
            (graph, intrinsic)
        } else {
            let g = graph.induced(&keep)?;
            let iv = intrinsic.iter().zip(&keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect();
            (g, iv)
        };

        let eligible = intrinsic.iter().map(|&iv| iv >= price).collect();
        let n = graph.node_count();
        let mut in_prob = vec![0.0; graph.edge_count()];
        for v in 0..n as NodeId {
            let base = graph.in_offset(v);
            let deg = graph.in_degree(v);
            for k in 0..deg {
                in_prob[base + k] = match params.model {
                    Model::IcConstant => params.ic_probability,
                    Model::IcWeighted | Model::LinearThreshold => 1.0 / deg as f64,
                };
            }
        }
        let mut out_prob = vec![0.0; graph.edge_count()];
        for u in 0..n as NodeId {
            let base = graph.out_offset(u);
            for (k, &v) in graph.out_neighbors(u).iter().enumerate() {
                out_prob[base + k] = match params.model {
                    Model::IcConstant => params.ic_probability,
                    Model::IcWeighted | Model::LinearThreshold => 1.0 / graph.in_degree(v) as f64,
                };
            }
        }
        Ok(TCNetwork { graph, params, price, coupon, intrinsic, eligible, in_prob, out_prob })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> DiffusionParams {
        self.params
    }

    pub fn model(&self) -> Model {
        self.params.model
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn price(&self) -> f64 {
        self.price
    }

    pub fn coupon(&self) -> f64 {
        self.coupon
    }

    /// Normalized discount ratio `(P - C) / P`.
    pub fn discount_ratio(&self) -> f64 {
        (self.price - self.coupon) / self.price
    }

    pub fn intrinsic(&self) -> &[f64] {
        &self.intrinsic
    }

    /// Whether `v` can adopt through influence alone (`I_v >= P`).
    pub fn adopter_eligible(&self, v: NodeId) -> bool {
        self.eligible[v as usize]
    }

    /// `f(V) = (P - C) n`, the profit of seeding everybody.
    pub fn full_profit(&self) -> f64 {
        (self.price - self.coupon) * self.node_count() as f64
    }

    /// Profit for a mean adopter count and seed count.
    pub fn profit(&self, adopters: f64, seeds: usize) -> f64 {
        self.price * adopters - self.coupon * seeds as f64
    }

    /// Probabilities (IC) or weights (LT) of `v`'s in-edges, aligned with
    /// `graph().in_neighbors(v)`.
    pub fn in_probs(&self, v: NodeId) -> &[f64] {
        let base = self.graph.in_offset(v);
        &self.in_prob[base..base + self.graph.in_degree(v)]
    }

    /// Probabilities of `u`'s out-edges, aligned with `graph().out_neighbors(u)`.
    pub fn out_probs(&self, u: NodeId) -> &[f64] {
        let base = self.graph.out_offset(u);
        &self.out_prob[base..base + self.graph.out_degree(u)]
    }

    /// Stable fingerprint of the structure and parameters, used to tag cache
    /// files.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        h.write_u64(self.node_count() as u64);
        for (u, v) in self.graph.edges() {
            h.write_u64(((u as u64) << 32) | v as u64);
        }
        h.write(self.params.model.as_str().as_bytes());
        h.write_u64(self.params.ic_probability.to_bits());
        h.write_u64(self.price.to_bits());
        h.write_u64(self.coupon.to_bits());
        for &x in &self.intrinsic {
            h.write_u64(x.to_bits());
        }
        h.0
    }
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.write(&x.to_le_bytes());
    }
}

/// Draws `I_v` uniformly from `[P - C, 1]` for every node.
pub fn generate_intrinsics(node_count: usize, price: f64, coupon: f64, seed: u64) -> Result<Vec<f64>> {
    if !(coupon >= 0.0 && coupon < price && price <= 1.0) {
        return Err(Error::param(format!("need 0 <= coupon < price <= 1, got P={price} C={coupon}")));
    }
    let lo = price - coupon;
    let mut rng = rng::stream(rng::derive(seed, rng::TAG_INTRINSICS), 0);
    Ok((0..node_count).map(|_| rng.random_range(lo..=1.0)).collect())
}

/// Reads intrinsic values, one decimal per line (line i is node i).
pub fn read_intrinsics<R: BufRead>(source: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let x: f64 =
            text.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("bad intrinsic value {text:?}") })?;
        out.push(x);
    }
    Ok(out)
}

/// Settings read from a network config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NetworkConfig {
    pub model: Option<Model>,
    pub price: Option<f64>,
    pub coupon_fraction: Option<f64>,
    pub ic_probability: Option<f64>,
    pub rng_seed: Option<u64>,
}

impl NetworkConfig {
    /// Parses `key = value` lines (`:` or whitespace also separate keys).
    pub fn parse<R: BufRead>(source: R) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let (key, value) = text
                .split_once(['=', ':'])
                .or_else(|| text.split_once(char::is_whitespace))
                .ok_or_else(|| Error::Parse { line: i + 1, message: "expected key = value".into() })?;
            map.insert(key.trim().to_string(), (i + 1, value.trim().to_string()));
        }
        fn num<T: FromStr>(key: &str, line: usize, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse { line, message: format!("bad value {v:?} for {key}") })
        }
        let mut cfg = NetworkConfig::default();
        for (key, (line, value)) in map {
            match key.as_str() {
                "model" => cfg.model = Some(value.parse()?),
                "price" => cfg.price = Some(num(&key, line, &value)?),
                "coupon-fraction" => cfg.coupon_fraction = Some(num(&key, line, &value)?),
                "ic-probability" => cfg.ic_probability = Some(num(&key, line, &value)?),
                "rng-seed" => cfg.rng_seed = Some(num(&key, line, &value)?),
                other => return Err(Error::Parse { line, message: format!("unknown key {other:?}") }),
            }
        }
        Ok(cfg)
    }
}
