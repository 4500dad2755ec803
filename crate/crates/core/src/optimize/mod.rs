//! Seed selection: double greedy and the four sampling-based algorithms.

mod algorithms;
mod greedy;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use algorithms::{node_order, ra_s, ra_s_traced, ra_t, rpm, spm, RasIteration, RasStop, RunConfig};
pub use greedy::{
    double_greedy, CoverageOracle, ExactOracle, FnOracle, NodeSet, Oracle, OracleKind, RealizationOracle,
    SimulationOracle,
};

use crate::diffusion::ProfitEstimate;
use crate::error::Error;
use crate::network::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Spm,
    Rpm,
    RaT,
    RaS,
    MaxInf,
    HighDegree,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Spm, Algorithm::Rpm, Algorithm::RaT, Algorithm::RaS, Algorithm::MaxInf, Algorithm::HighDegree];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Spm => "spm",
            Algorithm::Rpm => "rpm",
            Algorithm::RaT => "ra-t",
            Algorithm::RaS => "ra-s",
            Algorithm::MaxInf => "maxinf",
            Algorithm::HighDegree => "highdegree",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parameter(format!("unknown algorithm {s:?}")))
    }
}

/// Samples consumed by a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SampleCounts {
    pub simulations: u64,
    pub realizations: u64,
    pub ra_sets: u64,
}

/// A selected seed set with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSet {
    /// Sorted dense node ids.
    pub members: Vec<NodeId>,
    pub produced_by: Algorithm,
    /// Filled in by an evaluation pass.
    pub profit_estimate: Option<ProfitEstimate>,
    pub samples: SampleCounts,
    /// Derived parameters the run actually used (sample sizes, epsilon
    /// splits, iteration counts).
    pub details: BTreeMap<String, f64>,
}

impl SeedSet {
    pub(crate) fn new(members: Vec<NodeId>, produced_by: Algorithm) -> Self {
        SeedSet {
            members,
            produced_by,
            profit_estimate: None,
            samples: SampleCounts::default(),
            details: BTreeMap::new(),
        }
    }

    pub(crate) fn detail(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), value);
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
