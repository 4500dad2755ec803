//! Profit maximization with coupons under triggering diffusion models.
//!
//! A [`network::TCNetwork`] couples a directed graph with a price, a coupon
//! value, per-node intrinsic values and an IC or LT diffusion model. Seed
//! sets are chosen by randomized double greedy driven by one of several
//! profit estimators:
//!
//! * forward Monte Carlo simulation ([`optimize::spm`]),
//! * a fixed pool of sampled realizations ([`optimize::rpm`]),
//! * reverse adopted-reachable sets with a fixed threshold ([`optimize::ra_t`])
//!   or with a simulation-checked doubling schedule ([`optimize::ra_s`]).
//!
//! Small instances can be solved exactly with [`diffusion::exact`], which is
//! what the test suites use as ground truth.
//!
//! Sampling work is split into fixed-size blocks, each with its own ChaCha
//! stream, so results depend only on the seed and never on the thread count.
//! With the `parallel` feature (default) blocks run on rayon.

pub mod baselines;
pub mod diffusion;
pub mod error;
pub mod exec;
pub mod network;
pub mod optimize;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use network::{Graph, Model, NodeId, TCNetwork};

pub mod prelude {
    pub use crate::diffusion::{estimate_profit_simulation, EstimatorKind, ProfitEstimate};
    pub use crate::error::{Error, Result};
    pub use crate::network::{DiffusionParams, Graph, Model, NodeId, TCNetwork};
    pub use crate::optimize::{Algorithm, NodeSet, SampleCounts, SeedSet};
    pub use crate::sampling::RACollection;
}
