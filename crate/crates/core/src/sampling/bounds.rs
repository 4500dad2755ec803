//! Sample-size thresholds and the parameter choices that feed them.
//!
//! Every function returns the unrounded real threshold; callers take the
//! ceiling as a sample count. `big_n` is the confidence parameter `N`: the
//! guarantees hold with probability `1 − 1/N` (or `1 − 2/N`).

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

fn check_common(n: f64, big_n: f64, r: f64) -> Result<()> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::param(format!("node count {n} must be at least 1")));
    }
    if !(big_n > 1.0 && big_n.is_finite()) {
        return Err(Error::param(format!("N = {big_n} must exceed 1")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param(format!("discount ratio {r} not in (0,1]")));
    }
    Ok(())
}

fn check_eps(name: &str, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param(format!("{name} = {eps} must be positive")));
    }
    Ok(())
}

/// Simulations (or realizations) per estimate for the forward framework:
/// `(ln 8 + ln n + ln N)(2n² + εrn) / (ε²r²)`.
pub fn delta0(n: usize, big_n: f64, eps: f64, r: f64) -> Result<f64> {
    let n = n as f64;
    check_common(n, big_n, r)?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("epsilon {eps} not in (0, 1/2)")));
    }
    Ok((8f64.ln() + n.ln() + big_n.ln()) * (2.0 * n * n + eps * r * n) / (eps * eps * r * r))
}

/// RA sets needed for every seed set to be accurate:
/// `(ln N + n ln 2)(2 + ε₁r) / (ε₁²r²)`.
pub fn delta1(n: usize, big_n: f64, eps1: f64, r: f64) -> Result<f64> {
    let n = n as f64;
    check_common(n, big_n, r)?;
    check_eps("epsilon1", eps1)?;
    Ok((big_n.ln() + n * LN_2) * (2.0 + eps1 * r) / (eps1 * eps1 * r * r))
}

/// RA sets needed for the optimum to be accurate: `2 ln N / (ε₂²r²)`.
pub fn delta2(big_n: f64, eps2: f64, r: f64) -> Result<f64> {
    check_common(1.0, big_n, r)?;
    check_eps("epsilon2", eps2)?;
    Ok(2.0 * big_n.ln() / (eps2 * eps2 * r * r))
}

/// Martingale counterpart of [`delta1`]:
/// `(ln N + n ln 2)(6 + 2ε₁r) / (3ε₁²r²)`.
pub fn delta1_star(n: usize, big_n: f64, eps1: f64, r: f64) -> Result<f64> {
    let n = n as f64;
    check_common(n, big_n, r)?;
    check_eps("epsilon1", eps1)?;
    Ok((big_n.ln() + n * LN_2) * (6.0 + 2.0 * eps1 * r) / (3.0 * eps1 * eps1 * r * r))
}

/// Martingale counterpart of [`delta2`]; the lower-tail bound is the same.
pub fn delta2_star(big_n: f64, eps2: f64, r: f64) -> Result<f64> {
    delta2(big_n, eps2, r)
}

/// Simulations for the stopping check: `(2 + ε₁r) ln N / (ε₁²r²)`.
pub fn delta3(big_n: f64, eps1: f64, r: f64) -> Result<f64> {
    check_common(1.0, big_n, r)?;
    check_eps("epsilon1", eps1)?;
    Ok((2.0 + eps1 * r) * big_n.ln() / (eps1 * eps1 * r * r))
}

/// Splits `ε` into `ε₁ + ε₂/2` by scanning `ε₁ ∈ {step, 2·step, ...}` and
/// keeping the point that minimizes `max(δ₁, δ₂)`. Ties keep the smaller
/// `ε₁`.
pub fn search_rat_params(n: usize, big_n: f64, eps: f64, r: f64, step: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("epsilon {eps} not in (0, 1/2)")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param(format!("search step {step} must be positive")));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 1.. {
        let eps1 = k as f64 * step;
        let eps2 = 2.0 * (eps - eps1);
        if eps1 >= eps || eps2 <= 0.0 {
            break;
        }
        let cost = delta1(n, big_n, eps1, r)?.max(delta2(big_n, eps2, r)?);
        if best.is_none_or(|(c, _, _)| cost < c) {
            best = Some((cost, eps1, eps2));
        }
    }
    best.map(|(_, e1, e2)| (e1, e2))
        .ok_or_else(|| Error::param(format!("no grid point with step {step} below epsilon {eps}")))
}

/// Solution of the RA-S parameter system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RASParams {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub epsilon3: f64,
    pub k: u32,
    pub delta1_star: f64,
    pub delta2_star: f64,
    pub delta3: f64,
}

/// Solves for `(ε₁, ε₂)` such that
/// `(1 − ε₂) / (2(1 + ε₃)) − ε₁ = ½ − ε` and `δ₁*(ε₁) = 2^k δ₂*(ε₂)`.
///
/// The first equation gives `ε₂` as a decreasing affine function of `ε₁`;
/// the ratio condition is then a single root found by bisection.
pub fn solve_ras_params(n: usize, big_n: f64, eps: f64, r: f64, k: u32, eps3: f64) -> Result<RASParams> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("epsilon {eps} not in (0, 1/2)")));
    }
    check_eps("epsilon3", eps3)?;
    if k == 0 || k > 60 {
        return Err(Error::param(format!("k = {k} must be in 1..=60")));
    }
    check_common(n as f64, big_n, r)?;

    let eps2_of = |e1: f64| 1.0 - 2.0 * (1.0 + eps3) * (e1 + 0.5 - eps);
    let upper = 1.0 / (2.0 * (1.0 + eps3)) - 0.5 + eps;
    let lower = 1e-9;
    if upper <= lower {
        return Err(Error::Solver(format!(
            "no positive epsilon1 satisfies the ratio target for epsilon {eps} and epsilon3 {eps3}; \
             use a smaller epsilon3 or a larger epsilon"
        )));
    }
    let scale = 2f64.powi(k as i32);
    let gap = |e1: f64| -> f64 {
        let e2 = eps2_of(e1);
        if e2 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        delta1_star(n, big_n, e1, r).unwrap() - scale * delta2_star(big_n, e2, r).unwrap()
    };
    if gap(lower) <= 0.0 {
        return Err(Error::Solver(format!(
            "delta1* < 2^{k} delta2* across the feasible range; use a smaller k or a different epsilon3"
        )));
    }
    let (mut lo, mut hi) = (lower, upper);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let e1 = if gap(lo).abs() <= gap(hi).abs() { lo } else { hi };
    let e2 = eps2_of(e1);
    let d1 = delta1_star(n, big_n, e1, r)?;
    let d2 = delta2_star(big_n, e2, r)?;
    let residual = (d1 - scale * d2).abs() / d1;
    if residual > 1e-9 {
        return Err(Error::Solver(format!("bisection stalled with relative residual {residual:e}")));
    }
    Ok(RASParams {
        epsilon1: e1,
        epsilon2: e2,
        epsilon3: eps3,
        k,
        delta1_star: d1,
        delta2_star: d2,
        delta3: delta3(big_n, e1, r)?,
    })
}

/// Every threshold for one parameter tuple, with the split of `ε` each
/// algorithm uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub n: usize,
    pub big_n: f64,
    pub epsilon: f64,
    pub r: f64,
    /// RA-T split from the grid search.
    pub rat_epsilon1: f64,
    pub rat_epsilon2: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub ras: RASParams,
}

impl Thresholds {
    pub fn compute(n: usize, big_n: f64, eps: f64, r: f64, k: u32, eps3: f64, step: f64) -> Result<Self> {
        let (e1, e2) = search_rat_params(n, big_n, eps, r, step)?;
        Ok(Thresholds {
            n,
            big_n,
            epsilon: eps,
            r,
            rat_epsilon1: e1,
            rat_epsilon2: e2,
            delta0: delta0(n, big_n, eps, r)?,
            delta1: delta1(n, big_n, e1, r)?,
            delta2: delta2(big_n, e2, r)?,
            ras: solve_ras_params(n, big_n, eps, r, k, eps3)?,
        })
    }
}
