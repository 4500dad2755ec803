//! Reverse sampling: RA-set generation, the coverage estimator `F(R, S)`,
//! sample-size thresholds and parameter solvers.

mod bounds;
mod ra;

pub use bounds::{
    delta0, delta1, delta1_star, delta2, delta2_star, delta3, search_rat_params, solve_ras_params, RASParams,
    Thresholds,
};
pub use ra::{coverage_indicator, generate_ra_set, RACollection, RAScratch, RASet};
