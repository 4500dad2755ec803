//! Forward diffusion: Monte Carlo simulation, realizations, and the exact
//! enumeration oracle for tiny instances.

pub mod exact;
mod forward;
mod realization;

pub use forward::{estimate_profit_simulation, estimate_profit_simulation_with, simulate_once, SimScratch};
pub(crate) use realization::sample_triggering_set;
pub use realization::{replay_on_realization, sample_realization, Realization, RealizationSet, ReplayScratch};

/// Which estimator produced a [`ProfitEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Simulation,
    Realization,
    RaSet,
    Exact,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Simulation => "simulation",
            EstimatorKind::Realization => "realization",
            EstimatorKind::RaSet => "ra_set",
            EstimatorKind::Exact => "exact",
        }
    }
}

/// Estimated `f(S) = P·π(S) − C·|S|` for one seed set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfitEstimate {
    pub mean_profit: f64,
    pub mean_adopters: f64,
    pub sample_count: u64,
    pub estimator: EstimatorKind,
    /// Standard error of `mean_profit` (0 for exact values).
    pub std_error: f64,
}

impl ProfitEstimate {
    /// Builds an estimate from per-sample adopter sums.
    pub(crate) fn from_sums(
        price: f64,
        coupon: f64,
        seeds: usize,
        samples: u64,
        sum: f64,
        sum_sq: f64,
        estimator: EstimatorKind,
    ) -> Self {
        let l = samples.max(1) as f64;
        let mean = sum / l;
        let var = if samples > 1 { ((sum_sq - l * mean * mean) / (l - 1.0)).max(0.0) } else { 0.0 };
        ProfitEstimate {
            mean_profit: price * mean - coupon * seeds as f64,
            mean_adopters: mean,
            sample_count: samples,
            estimator,
            std_error: price * (var / l).sqrt(),
        }
    }
}
