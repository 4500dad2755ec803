//! JSON reports. Every struct rejects unknown fields so a report read back
//! in strict mode fails loudly on schema drift.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tcpm::diffusion::ProfitEstimate;
use tcpm::optimize::SampleCounts;
use tcpm::{Model, TCNetwork};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSummary {
    pub n: usize,
    pub m: usize,
    pub price: f64,
    pub coupon: f64,
    pub r: f64,
    pub model: String,
    pub ic_probability: Option<f64>,
}

impl NetworkSummary {
    pub fn of(net: &TCNetwork) -> Self {
        NetworkSummary {
            n: net.node_count(),
            m: net.edge_count(),
            price: net.price(),
            coupon: net.coupon(),
            r: net.discount_ratio(),
            model: net.model().as_str().to_string(),
            ic_probability: (net.model() == Model::IcConstant).then_some(net.params().ic_probability),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Estimate {
    pub mean_profit: f64,
    pub mean_adopters: f64,
    pub estimator: String,
    pub sample_count: u64,
    pub std_error: f64,
}

impl From<&ProfitEstimate> for Estimate {
    fn from(e: &ProfitEstimate) -> Self {
        Estimate {
            mean_profit: e.mean_profit,
            mean_adopters: e.mean_adopters,
            estimator: e.estimator.as_str().to_string(),
            sample_count: e.sample_count,
            std_error: e.std_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub simulations: u64,
    pub realizations: u64,
    pub ra_sets: u64,
}

impl From<SampleCounts> for Samples {
    fn from(s: SampleCounts) -> Self {
        Samples { simulations: s.simulations, realizations: s.realizations, ra_sets: s.ra_sets }
    }
}

/// Every input that influenced a run, so the run can be repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub graph: String,
    pub undirected: bool,
    pub model: String,
    pub ic_p: f64,
    pub price: f64,
    pub coupon_frac: f64,
    pub intrinsics_file: Option<String>,
    pub eps: f64,
    pub big_n: Option<f64>,
    pub k: u32,
    pub eps3: f64,
    pub plateau_pct: f64,
    pub max_ra: Option<u64>,
    pub l_override: Option<u64>,
    pub eval_sims: u64,
    pub seed: u64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub algorithm: String,
    pub parameters: Parameters,
    /// Original node labels, ascending.
    pub seed_set: Vec<u64>,
    pub seed_count: usize,
    pub estimated_profit: Estimate,
    pub wall_time_ms: u64,
    pub sample_counts: Samples,
    pub network_summary: NetworkSummary,
    pub details: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationReport {
    pub seed_set: Vec<u64>,
    pub seed_count: usize,
    pub estimated_profit: Estimate,
    pub seed: u64,
    pub network_summary: NetworkSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactValue {
    pub seed_set: Vec<u64>,
    pub spread: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleReport {
    pub network_summary: NetworkSummary,
    pub outcomes: u64,
    pub query: Option<ExactValue>,
    pub optimum: Option<ExactValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestReport {
    pub nodes: usize,
    pub edges: usize,
    pub max_out_degree: usize,
    pub max_in_degree: usize,
    pub isolated: usize,
    pub adopter_eligible: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatRow {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasRow {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub epsilon3: f64,
    pub k: u32,
    pub delta1_star: f64,
    pub delta2_star: f64,
    pub delta3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdReport {
    pub n: usize,
    pub big_n: f64,
    pub epsilon: f64,
    pub r: f64,
    pub delta0: f64,
    /// `δ₂` with `ε₂ = ε`; also the default node-ordering probe count.
    pub delta2_at_eps: f64,
    pub ra_t: RatRow,
    pub ra_s: RasRow,
}
