//! Equivalence between the isoelastic signaling game and a symmetric all-pay auction.
//!
//! With `θ̄ = 1` and `s = 1`, the value `v = θ^σ` has distribution `G(v) = v^α`,
//! `α = β/(σ(N-1))`, and the all-pay bid is `b̃(v) = v·G(v)^{N-1}·β/(β+σ)`.

use rayon::prelude::*;

use crate::environment::{Environment, TypeDomain};
use crate::equilibrium;
use crate::error::{domain, Result};
use crate::numeric::log_space;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuctionMap {
    pub beta: f64,
    pub sigma: f64,
    pub n: u32,
    pub alpha: f64,
}

impl AuctionMap {
    pub fn new(beta: f64, sigma: f64, n: u32) -> Result<Self> {
        if !(beta > 0.0) || !(sigma > 0.0) {
            return domain(format!("beta and sigma must be positive, got {beta}, {sigma}"));
        }
        if n < 2 {
            return domain(format!("an auction needs at least 2 bidders, got {n}"));
        }
        Ok(Self {
            beta,
            sigma,
            n,
            alpha: beta / (sigma * (n as f64 - 1.0)),
        })
    }

    /// Value of type `θ`: `θ^σ`.
    pub fn value_of(&self, theta: f64) -> f64 {
        theta.powf(self.sigma)
    }

    /// `G(v) = v^α`.
    pub fn cdf(&self, v: f64) -> f64 {
        v.powf(self.alpha)
    }

    fn rivals(&self) -> f64 {
        self.n as f64 - 1.0
    }
}

fn unit(v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return domain(format!("value must lie in [0, 1], got {v}"));
    }
    Ok(())
}

/// `b̃(v) = v·G(v)^{N-1}·β/(β+σ)`.
pub fn allpay_bid(map: &AuctionMap, v: f64) -> Result<f64> {
    unit(v)?;
    Ok(v * map.cdf(v).powf(map.rivals()) * map.beta / (map.beta + map.sigma))
}

/// `E[max_{j≠i} v_j | max < v]` in its order-statistics form `v·α(N-1)/(α(N-1)+1)` and its
/// elasticity form `v·β/(β+σ)`.
pub fn conditional_second_highest(map: &AuctionMap, v: f64) -> Result<(f64, f64)> {
    unit(v)?;
    if v == 0.0 {
        return domain("conditioning event has probability zero at v = 0");
    }
    let m = map.alpha * map.rivals();
    Ok((v * m / (m + 1.0), v * map.beta / (map.beta + map.sigma)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub se: Option<f64>,
    pub accepted: u64,
    pub draws: u64,
}

const MC_CHUNKS: u64 = 64;

/// Monte Carlo estimate of [`conditional_second_highest`]: draws `N - 1` values from `G`,
/// keeps draws whose maximum is below `v`.
pub fn mc_conditional_second_highest(map: &AuctionMap, v: f64, draws: u64, seed: u64) -> Result<McEstimate> {
    unit(v)?;
    if v == 0.0 || draws == 0 {
        return domain("need v > 0 and at least one draw");
    }
    let inv_alpha = 1.0 / map.alpha;
    let per_chunk = draws.div_ceil(MC_CHUNKS);
    let chunks: Vec<Vec<f64>> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::substream(seed, c);
            let count = per_chunk.min(draws.saturating_sub(c * per_chunk));
            (0..count)
                .filter_map(|_| {
                    let m = (0..map.n - 1)
                        .map(|_| rng::uniform(&mut r).powf(inv_alpha))
                        .fold(0.0, f64::max);
                    (m < v).then_some(m)
                })
                .collect()
        })
        .collect();
    let kept: Vec<f64> = chunks.into_iter().flatten().collect();
    if kept.is_empty() {
        return domain(format!("no draws fell below v = {v}"));
    }
    let (mean, se) = rng::mean_and_se(&kept);
    Ok(McEstimate {
        mean,
        se,
        accepted: kept.len() as u64,
        draws,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceRow {
    pub v: f64,
    pub bid_closed_form: f64,
    pub bid_from_signaling: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub map: AuctionMap,
    pub gamma: f64,
    pub rows: Vec<EquivalenceRow>,
    pub max_discrepancy: f64,
    /// Largest `|b̃(v)/(v G(v)^{N-1}) - β/(β+σ)|` over the grid.
    pub waste_recovery_error: f64,
}

/// Default value grid: 256 log-spaced points on `[1e-3, 1]`.
pub fn default_value_grid() -> Vec<f64> {
    log_space(1e-3, 1.0, 256)
}

/// Compares `b̃(v)` with `D(A(v^{1/σ}))` from the signaling solver (`s = 1`, `θ̄ = 1`,
/// `D(a) = a^γ`).
pub fn verify_equivalence(beta: f64, sigma: f64, gamma: f64, n: u32, grid: &[f64]) -> Result<EquivalenceReport> {
    let map = AuctionMap::new(beta, sigma, n)?;
    let env = Environment::isoelastic(1.0, beta, sigma, gamma)?;
    let strategy = equilibrium::solve_multiplicative(&env, &TypeDomain::new(1.0)?)?;
    let target = beta / (beta + sigma);
    let mut rows = Vec::with_capacity(grid.len());
    let mut waste_recovery_error: f64 = 0.0;
    for &v in grid {
        let closed = allpay_bid(&map, v)?;
        let theta = v.powf(1.0 / sigma);
        let signaling = strategy.action_at(theta)?.powf(gamma);
        if v > 0.0 {
            let recovered = closed / (v * map.cdf(v).powf(map.rivals()));
            waste_recovery_error = waste_recovery_error.max((recovered - target).abs());
        }
        rows.push(EquivalenceRow {
            v,
            bid_closed_form: closed,
            bid_from_signaling: signaling,
            discrepancy: (closed - signaling).abs(),
        });
    }
    let max_discrepancy = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        map,
        gamma,
        rows,
        max_discrepancy,
        waste_recovery_error,
    })
}
