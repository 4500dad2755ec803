use std::io::{Read, Write};

use rand::Rng;

use crate::diffusion::sample_triggering_set;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::network::{NodeId, TCNetwork};
use crate::rng::{self, Stream};

const RA_BLOCK: usize = 4096;
const CACHE_MAGIC: &[u8; 4] = b"TCRA";
const CACHE_VERSION: u8 = 1;

/// Nodes that reach a uniformly chosen root through sampled triggering sets.
/// The root is always the first member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RASet {
    pub root: NodeId,
    pub members: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct RAScratch {
    visited: Vec<bool>,
    buf: Vec<NodeId>,
}

impl RAScratch {
    pub fn new(n: usize) -> Self {
        RAScratch { visited: vec![false; n], buf: Vec::new() }
    }
}

/// Appends one RA set to `out` and returns its root.
///
/// The walk goes backwards from the root; each visited node's triggering
/// set is sampled once, on first visit, so no full realization is built.
fn grow_ra_set(net: &TCNetwork, rng: &mut Stream, scratch: &mut RAScratch, out: &mut Vec<NodeId>) -> NodeId {
    let root = rng.random_range(0..net.node_count()) as NodeId;
    let start = out.len();
    out.push(root);
    scratch.visited[root as usize] = true;
    let mut head = start;
    while head < out.len() {
        let u = out[head];
        head += 1;
        scratch.buf.clear();
        sample_triggering_set(net, u, rng, &mut scratch.buf);
        for &w in &scratch.buf {
            if !scratch.visited[w as usize] {
                scratch.visited[w as usize] = true;
                out.push(w);
            }
        }
    }
    for &v in &out[start..] {
        scratch.visited[v as usize] = false;
    }
    root
}

pub fn generate_ra_set(net: &TCNetwork, rng: &mut Stream, scratch: &mut RAScratch) -> RASet {
    let mut members = Vec::new();
    let root = grow_ra_set(net, rng, scratch, &mut members);
    RASet { root, members }
}

/// `x(S, R)`: 1 if the set meets `seeds`.
pub fn coverage_indicator(seeds: &[bool], set: &[NodeId]) -> u32 {
    set.iter().any(|&v| seeds[v as usize]) as u32
}

/// A growable collection of RA sets with a node → set inverted index.
#[derive(Debug, Clone)]
pub struct RACollection {
    n: usize,
    price: f64,
    coupon: f64,
    roots: Vec<NodeId>,
    offsets: Vec<usize>,
    members: Vec<NodeId>,
    index_offsets: Vec<usize>,
    index: Vec<u32>,
    rounds: u64,
    mode: ExecMode,
}

impl RACollection {
    pub fn empty(net: &TCNetwork) -> Self {
        Self::empty_with(net, ExecMode::default())
    }

    pub fn empty_with(net: &TCNetwork, mode: ExecMode) -> Self {
        RACollection {
            n: net.node_count(),
            price: net.price(),
            coupon: net.coupon(),
            roots: Vec::new(),
            offsets: vec![0],
            members: Vec::new(),
            index_offsets: vec![0; net.node_count() + 1],
            index: Vec::new(),
            rounds: 0,
            mode,
        }
    }

    /// Generates `l` independent RA sets.
    pub fn generate(net: &TCNetwork, l: u64, seed: u64) -> Self {
        Self::generate_with(net, l, seed, ExecMode::default())
    }

    pub fn generate_with(net: &TCNetwork, l: u64, seed: u64, mode: ExecMode) -> Self {
        let mut c = Self::empty_with(net, mode);
        c.extend(net, l, seed);
        c
    }

    /// Appends `count` fresh RA sets; existing sets are kept as they are.
    /// Each call draws from its own stream family, so a fixed sequence of
    /// calls is reproducible.
    pub fn extend(&mut self, net: &TCNetwork, count: u64, seed: u64) {
        assert_eq!(net.node_count(), self.n, "collection belongs to another network");
        let key = rng::derive(rng::derive(seed, rng::TAG_RA_SETS), self.rounds);
        self.rounds += 1;
        let n = self.n;
        let blocks = exec::map_blocks(self.mode, count as usize, RA_BLOCK, |block, range| {
            let mut rng = rng::stream(key, block);
            let mut scratch = RAScratch::new(n);
            let mut roots = Vec::with_capacity(range.len());
            let mut lens = Vec::with_capacity(range.len());
            let mut members = Vec::new();
            for _ in range {
                let before = members.len();
                roots.push(grow_ra_set(net, &mut rng, &mut scratch, &mut members));
                lens.push(members.len() - before);
            }
            (roots, lens, members)
        });
        for (roots, lens, members) in blocks {
            self.roots.extend(roots);
            for len in lens {
                let last = *self.offsets.last().unwrap();
                self.offsets.push(last + len);
            }
            self.members.extend(members);
        }
        self.rebuild_index();
    }

    fn push_set(&mut self, root: NodeId, members: &[NodeId]) {
        self.roots.push(root);
        self.members.extend_from_slice(members);
        self.offsets.push(self.members.len());
    }

    fn rebuild_index(&mut self) {
        let mut counts = vec![0usize; self.n + 1];
        for &v in &self.members {
            counts[v as usize + 1] += 1;
        }
        for i in 0..self.n {
            counts[i + 1] += counts[i];
        }
        let mut cursor = counts.clone();
        let mut index = vec![0u32; self.members.len()];
        for i in 0..self.len() {
            for &v in self.set(i) {
                index[cursor[v as usize]] = i as u32;
                cursor[v as usize] += 1;
            }
        }
        self.index_offsets = counts;
        self.index = index;
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn set(&self, i: usize) -> &[NodeId] {
        &self.members[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn root(&self, i: usize) -> NodeId {
        self.roots[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        (0..self.len()).map(move |i| self.set(i))
    }

    /// Indices of the sets containing `v`.
    pub fn sets_containing(&self, v: NodeId) -> &[u32] {
        &self.index[self.index_offsets[v as usize]..self.index_offsets[v as usize + 1]]
    }

    /// Total number of stored memberships, `Σ|R_i|`.
    pub fn total_size(&self) -> usize {
        self.members.len()
    }

    pub fn price(&self) -> f64 {
        self.price
    }

    pub fn coupon(&self) -> f64 {
        self.coupon
    }

    /// Number of sets that meet `seeds` (a membership mask).
    pub fn covered_count(&self, seeds: &[bool]) -> usize {
        let mut hit = vec![false; self.len()];
        let mut count = 0;
        for (v, _) in seeds.iter().enumerate().filter(|(_, &s)| s) {
            for &i in self.sets_containing(v as NodeId) {
                if !hit[i as usize] {
                    hit[i as usize] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// `F(R, S) = P·n·(covered / l) − C·|S|`.
    pub fn estimate(&self, seeds: &[bool]) -> f64 {
        let size = seeds.iter().filter(|&&s| s).count();
        self.value_from_count(self.covered_count(seeds), size)
    }

    pub(crate) fn value_from_count(&self, covered: usize, size: usize) -> f64 {
        if self.is_empty() {
            return -self.coupon * size as f64;
        }
        self.price * self.n as f64 * covered as f64 / self.len() as f64 - self.coupon * size as f64
    }

    /// Writes the binary cache: magic, version byte, `n`, `l`, network
    /// fingerprint (all little-endian `u64`), then `root, len, members...` as
    /// `u32` per set.
    pub fn write_cache<W: Write>(&self, mut out: W, fingerprint: u64) -> Result<()> {
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&[CACHE_VERSION])?;
        for x in [self.n as u64, self.len() as u64, fingerprint] {
            out.write_all(&x.to_le_bytes())?;
        }
        for i in 0..self.len() {
            let set = self.set(i);
            out.write_all(&self.roots[i].to_le_bytes())?;
            out.write_all(&(set.len() as u32).to_le_bytes())?;
            for &v in set {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a cache written for `net`; a fingerprint mismatch is an error.
    pub fn read_cache<R: Read>(mut input: R, net: &TCNetwork) -> Result<Self> {
        let mut magic = [0u8; 5];
        input.read_exact(&mut magic)?;
        if &magic[..4] != CACHE_MAGIC {
            return Err(Error::Format("not an RA collection cache".into()));
        }
        if magic[4] != CACHE_VERSION {
            return Err(Error::Format(format!("unsupported cache version {}", magic[4])));
        }
        let mut word = [0u8; 8];
        let mut next_u64 = |input: &mut R| -> Result<u64> {
            input.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let n = next_u64(&mut input)? as usize;
        let l = next_u64(&mut input)?;
        let fp = next_u64(&mut input)?;
        if n != net.node_count() || fp != net.fingerprint() {
            return Err(Error::Format("cache was written for a different network".into()));
        }
        let mut c = Self::empty(net);
        let mut half = [0u8; 4];
        let mut next_u32 = |input: &mut R| -> Result<u32> {
            input.read_exact(&mut half)?;
            Ok(u32::from_le_bytes(half))
        };
        let mut members = Vec::new();
        for _ in 0..l {
            let root = next_u32(&mut input)?;
            let len = next_u32(&mut input)? as usize;
            members.clear();
            for _ in 0..len {
                let v = next_u32(&mut input)?;
                if v as usize >= n {
                    return Err(Error::Format(format!("member {v} out of range")));
                }
                members.push(v);
            }
            if root as usize >= n || members.first() != Some(&root) {
                return Err(Error::Format("set does not start with its root".into()));
            }
            c.push_set(root, &members);
        }
        c.rebuild_index();
        Ok(c)
    }
}
