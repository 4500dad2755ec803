use crate::diffusion::{estimate_profit_simulation, RealizationSet};
use crate::error::{Error, Result};
use crate::network::{NodeId, TCNetwork};
use crate::rng;
use crate::sampling::{self, RACollection};

use super::greedy::{double_greedy, CoverageOracle, RealizationOracle, SimulationOracle};
use super::{Algorithm, SeedSet};

/// Knobs shared by the seed-selection algorithms. Unused fields are ignored
/// by algorithms that do not need them.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Approximation slack, in `(0, 1/2)`.
    pub epsilon: f64,
    /// Confidence parameter `N`; defaults to the node count (at least 2).
    pub big_n: Option<f64>,
    /// Fixed sample count for SPM/RPM instead of the threshold.
    pub l_override: Option<u64>,
    /// Cap on RA sets for RA-T and RA-S.
    pub max_ra: Option<u64>,
    /// RA-S: `δ₁* = 2^k δ₂*`.
    pub k: u32,
    /// RA-S stopping slack.
    pub epsilon3: f64,
    /// RA-S early return when `F` moves by less than this percentage between
    /// iterations. 0 disables the rule.
    pub plateau_pct: f64,
    /// Lower bound on the optimum; defaults to `f(V) = (P − C) n`.
    pub lower_bound: Option<f64>,
    /// RPM refuses to sample more than this many bytes of realizations.
    pub memory_budget: u64,
    /// RA-T grid step for splitting epsilon.
    pub search_step: f64,
    /// RA sets used to rank nodes; defaults to `⌈δ₂⌉` with `ε₂ = ε`.
    pub probe_count: Option<u64>,
    /// Explicit examination order (a permutation of all nodes).
    pub order: Option<Vec<NodeId>>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilon: 0.4,
            big_n: None,
            l_override: None,
            max_ra: None,
            k: 5,
            epsilon3: 0.1,
            plateau_pct: 2.0,
            lower_bound: None,
            memory_budget: 8 << 30,
            search_step: 0.01,
            probe_count: None,
            order: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn big_n(&self, net: &TCNetwork) -> f64 {
        self.big_n.unwrap_or((net.node_count() as f64).max(2.0))
    }

    fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Parameter(format!("epsilon {} not in (0, 1/2)", self.epsilon)));
        }
        if self.plateau_pct < 0.0 {
            return Err(Error::Parameter("plateau percentage must be nonnegative".into()));
        }
        if self.l_override == Some(0) || self.max_ra == Some(0) {
            return Err(Error::Parameter("sample counts must be positive".into()));
        }
        Ok(())
    }

    fn lower_bound(&self, net: &TCNetwork) -> f64 {
        self.lower_bound.unwrap_or_else(|| net.full_profit())
    }

    /// `(2ε/n) L*`, the offset the forward framework adds to every marginal.
    fn forward_shift(&self, net: &TCNetwork) -> f64 {
        2.0 * self.epsilon / net.node_count() as f64 * self.lower_bound(net)
    }

    fn forward_samples(&self, net: &TCNetwork) -> Result<u64> {
        match self.l_override {
            Some(l) => Ok(l),
            None => {
                let d = sampling::delta0(net.node_count(), self.big_n(net), self.epsilon, net.discount_ratio())?;
                Ok(d.ceil() as u64)
            }
        }
    }

    /// The examination order plus the RA sets spent computing it.
    fn order(&self, net: &TCNetwork) -> Result<(Vec<NodeId>, u64)> {
        if let Some(order) = &self.order {
            let mut seen = vec![false; net.node_count()];
            for &v in order {
                if v as usize >= seen.len() || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(Error::Parameter("order must be a permutation of the nodes".into()));
                }
            }
            if order.len() != net.node_count() {
                return Err(Error::Parameter("order must be a permutation of the nodes".into()));
            }
            return Ok((order.clone(), 0));
        }
        let probes = match self.probe_count {
            Some(p) => p.max(1),
            None => sampling::delta2(self.big_n(net), self.epsilon, net.discount_ratio())?.ceil() as u64,
        };
        Ok((node_order(net, probes, rng::derive(self.seed, rng::TAG_ORDER)), probes))
    }
}

/// Nodes sorted by how many of `probe_count` fresh RA sets contain them,
/// most first; ties by ascending id.
pub fn node_order(net: &TCNetwork, probe_count: u64, seed: u64) -> Vec<NodeId> {
    let coll = RACollection::generate(net, probe_count.max(1), seed);
    let mut order: Vec<NodeId> = (0..net.node_count() as NodeId).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(coll.sets_containing(v).len()), v));
    order
}

fn greedy_stream(seed: u64, round: u64) -> rng::Stream {
    rng::stream(rng::derive(seed, rng::TAG_GREEDY), round)
}

/// Forward framework with fresh simulations for every inspected set.
pub fn spm(net: &TCNetwork, cfg: &RunConfig) -> Result<SeedSet> {
    cfg.check()?;
    let l = cfg.forward_samples(net)?;
    let (order, probes) = cfg.order(net)?;
    let mut oracle = SimulationOracle::new(net, l, rng::derive(cfg.seed, rng::TAG_SIMULATION), cfg.forward_shift(net));
    let chosen = double_greedy(&mut oracle, net.node_count(), &order, &mut greedy_stream(cfg.seed, 0))?;
    let mut out = SeedSet::new(chosen.members(), Algorithm::Spm);
    out.samples.simulations = oracle.simulations();
    out.samples.ra_sets = probes;
    out.detail("l", l as f64);
    out.detail("lower_bound", cfg.lower_bound(net));
    Ok(out)
}

/// Forward framework over one fixed pool of realizations.
pub fn rpm(net: &TCNetwork, cfg: &RunConfig) -> Result<SeedSet> {
    cfg.check()?;
    let l = cfg.forward_samples(net)?;
    let pool = RealizationSet::generate(net, l, rng::derive(cfg.seed, rng::TAG_REALIZATIONS), cfg.memory_budget)?;
    let (order, probes) = cfg.order(net)?;
    let mut oracle = RealizationOracle::new(&pool, cfg.forward_shift(net));
    let chosen = double_greedy(&mut oracle, net.node_count(), &order, &mut greedy_stream(cfg.seed, 0))?;
    let mut out = SeedSet::new(chosen.members(), Algorithm::Rpm);
    out.samples.realizations = l;
    out.samples.ra_sets = probes;
    out.detail("l", l as f64);
    out.detail("lower_bound", cfg.lower_bound(net));
    Ok(out)
}

/// RA sets with a fixed threshold `max(δ₁, δ₂)`, then exact double greedy on
/// `F(R, ·)`.
pub fn ra_t(net: &TCNetwork, cfg: &RunConfig) -> Result<SeedSet> {
    cfg.check()?;
    let n = net.node_count();
    let big_n = cfg.big_n(net);
    let r = net.discount_ratio();
    let (eps1, eps2) = sampling::search_rat_params(n, big_n, cfg.epsilon, r, cfg.search_step)?;
    let d1 = sampling::delta1(n, big_n, eps1, r)?;
    let d2 = sampling::delta2(big_n, eps2, r)?;
    let mut l = d1.max(d2).ceil() as u64;
    if let Some(cap) = cfg.max_ra {
        l = l.min(cap);
    }
    let coll = RACollection::generate(net, l, rng::derive(cfg.seed, rng::TAG_RA_SETS));
    let (order, probes) = cfg.order(net)?;
    let mut oracle = CoverageOracle::new(&coll);
    let chosen = double_greedy(&mut oracle, n, &order, &mut greedy_stream(cfg.seed, 0))?;

    let mut out = SeedSet::new(chosen.members(), Algorithm::RaT);
    out.samples.ra_sets = l + probes;
    out.detail("epsilon1", eps1);
    out.detail("epsilon2", eps2);
    out.detail("delta1", d1);
    out.detail("delta2", d2);
    out.detail("l", l as f64);
    out.detail("objective", coll.estimate(chosen.mask()));
    Ok(out)
}

/// One pass of the RA-S loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasIteration {
    pub ra_sets: u64,
    /// `F(R, V*)` for this iteration's output.
    pub objective: f64,
    /// Simulation estimate of `f(V*)`, when the check ran.
    pub check: Option<f64>,
}

/// Why RA-S returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasStop {
    /// Collection reached `δ₁*`.
    Threshold,
    /// `F(R, V*) <= (1 + ε₃) f̃(V*)`.
    Verified,
    /// `F` changed by less than the plateau percentage.
    Plateau,
    /// Collection reached `max_ra`.
    Cap,
}

impl RasStop {
    pub fn as_str(self) -> &'static str {
        match self {
            RasStop::Threshold => "threshold",
            RasStop::Verified => "verified",
            RasStop::Plateau => "plateau",
            RasStop::Cap => "cap",
        }
    }
}

pub fn ra_s(net: &TCNetwork, cfg: &RunConfig) -> Result<SeedSet> {
    ra_s_traced(net, cfg).map(|(s, _, _)| s)
}

/// RA sets with a doubling schedule from `δ₂*` to `δ₁*`, checking each
/// candidate against `δ₃` fresh simulations. Also returns the per-iteration
/// trace and the stopping reason.
pub fn ra_s_traced(net: &TCNetwork, cfg: &RunConfig) -> Result<(SeedSet, Vec<RasIteration>, RasStop)> {
    cfg.check()?;
    let n = net.node_count();
    let params = sampling::solve_ras_params(n, cfg.big_n(net), cfg.epsilon, net.discount_ratio(), cfg.k, cfg.epsilon3)?;
    let check_sims = params.delta3.ceil() as u64;
    let (order, probes) = cfg.order(net)?;

    let mut coll = RACollection::empty(net);
    let mut l = params.delta2_star.ceil() as u64;
    let mut trace = Vec::new();
    let mut simulations = 0;
    let mut round = 0u64;
    let (chosen, stop) = loop {
        let mut final_round = l as f64 >= params.delta1_star;
        let mut capped = false;
        if let Some(cap) = cfg.max_ra {
            if l >= cap {
                l = cap;
                capped = !final_round;
                final_round = true;
            }
        }
        coll.extend(net, l - coll.len() as u64, cfg.seed);
        let mut oracle = CoverageOracle::new(&coll);
        let chosen = double_greedy(&mut oracle, n, &order, &mut greedy_stream(cfg.seed, round))?;
        let objective = coll.estimate(chosen.mask());
        if final_round {
            trace.push(RasIteration { ra_sets: l, objective, check: None });
            break (chosen, if capped { RasStop::Cap } else { RasStop::Threshold });
        }
        let members = chosen.members();
        let check_seed = rng::derive(rng::derive(cfg.seed, rng::TAG_CHECK), round);
        let check = if members.is_empty() {
            0.0
        } else {
            simulations += check_sims;
            estimate_profit_simulation(net, &members, check_sims, check_seed).mean_profit
        };
        trace.push(RasIteration { ra_sets: l, objective, check: Some(check) });
        if objective <= (1.0 + params.epsilon3) * check {
            break (chosen, RasStop::Verified);
        }
        if cfg.plateau_pct > 0.0 && trace.len() >= 2 {
            let prev = trace[trace.len() - 2].objective;
            if (prev - objective) < cfg.plateau_pct / 100.0 * prev.abs() {
                break (chosen, RasStop::Plateau);
            }
        }
        l *= 2;
        round += 1;
    };

    let mut out = SeedSet::new(chosen.members(), Algorithm::RaS);
    out.samples.ra_sets = coll.len() as u64 + probes;
    out.samples.simulations = simulations;
    out.detail("epsilon1", params.epsilon1);
    out.detail("epsilon2", params.epsilon2);
    out.detail("epsilon3", params.epsilon3);
    out.detail("k", params.k as f64);
    out.detail("delta1_star", params.delta1_star);
    out.detail("delta2_star", params.delta2_star);
    out.detail("delta3", params.delta3);
    out.detail("iterations", trace.len() as f64);
    out.detail("l", coll.len() as f64);
    out.detail("objective", trace.last().map_or(0.0, |t| t.objective));
    Ok((out, trace, stop))
}
