//! Brute-force incentive-compatibility check over a grid of (true type, mimicked type) pairs.

use rayon::prelude::*;

use crate::environment::Environment;
use crate::equilibrium::Strategy;
use crate::error::{domain, Error, Result};

/// Default relative tolerance; the absolute tolerance is this times `max V` over the types.
pub const DEFAULT_REL_EPSILON: f64 = 1e-6;
/// Default refinement factor from the type grid to the candidate grid.
pub const CANDIDATE_REFINEMENT: usize = 4;
const SOC_STEP: f64 = 1e-3;

/// `V(θ̂) - C(A(θ̂), θ)`; `-∞` when the cost is infinite.
pub fn mimic_payoff(env: &Environment, strategy: &Strategy, theta: f64, mimic: f64) -> Result<f64> {
    let a = if mimic == 0.0 { 0.0 } else { strategy.action_at(mimic)? };
    env.payoff(mimic, a, theta)
}

/// Full payoff matrix, rows indexed by true type and columns by mimicked type.
#[derive(Debug, Clone, PartialEq)]
pub struct MimicPayoffSurface {
    pub types: Vec<f64>,
    pub candidates: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn mimic_surface(env: &Environment, strategy: &Strategy, types: &[f64], candidates: &[f64]) -> Result<MimicPayoffSurface> {
    let cols = candidate_table(env, strategy, candidates)?;
    let values = types
        .par_iter()
        .map(|&t| cols.iter().map(|&(v, a)| Ok(v - env.eval_cost(a, t)?)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(MimicPayoffSurface {
        types: types.to_vec(),
        candidates: candidates.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub theta: f64,
    pub mimic: f64,
    pub payoff: f64,
    /// Best payoff minus the truthful payoff; never negative since truth is a candidate.
    pub gain: f64,
}

fn candidate_table(env: &Environment, strategy: &Strategy, candidates: &[f64]) -> Result<Vec<(f64, f64)>> {
    candidates
        .iter()
        .map(|&c| {
            if c < 0.0 {
                return domain(format!("candidate type {c} is negative"));
            }
            let a = if c == 0.0 { 0.0 } else { strategy.action_at(c)? };
            Ok((env.eval_benefit(c)?, a))
        })
        .collect()
}

fn best_in_row(env: &Environment, strategy: &Strategy, theta: f64, cols: &[(f64, f64)], candidates: &[f64]) -> Result<BestResponse> {
    let truthful = mimic_payoff(env, strategy, theta, theta)?;
    let mut best = BestResponse {
        theta,
        mimic: theta,
        payoff: truthful,
        gain: 0.0,
    };
    for (&(v, a), &c) in cols.iter().zip(candidates) {
        let p = v - env.eval_cost(a, theta)?;
        if p > best.payoff {
            best.payoff = p;
            best.mimic = c;
        }
    }
    best.gain = if truthful.is_finite() { best.payoff - truthful } else { 0.0 };
    Ok(best)
}

/// [`best_response`] for every type, sharing one candidate table.
pub fn best_responses(env: &Environment, strategy: &Strategy, types: &[f64], candidates: &[f64]) -> Result<Vec<BestResponse>> {
    let mut cands = candidates.to_vec();
    cands.push(0.0);
    let cols = candidate_table(env, strategy, &cands)?;
    types
        .par_iter()
        .map(|&t| best_in_row(env, strategy, t, &cols, &cands))
        .collect()
}

/// Best mimicry target for type `θ` among `candidates` (the truthful report and the
/// opt-out `θ̂ = 0` are always considered).
pub fn best_response(env: &Environment, strategy: &Strategy, theta: f64, candidates: &[f64]) -> Result<BestResponse> {
    let mut cands = candidates.to_vec();
    cands.push(0.0);
    let cols = candidate_table(env, strategy, &cands)?;
    best_in_row(env, strategy, theta, &cols, &cands)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcReport {
    pub max_gain: f64,
    /// Type, mimicked type and gain of the largest deviation found.
    pub worst: BestResponse,
    pub epsilon: f64,
    pub types_checked: usize,
    pub candidates_checked: usize,
    pub soc_checked: usize,
    pub soc_violations: usize,
    pub passed: bool,
}

/// Candidate grid used when none is given: the strategy grid refined four times.
pub fn default_candidates(strategy: &Strategy) -> Vec<f64> {
    strategy.domain().refined(CANDIDATE_REFINEMENT)
}

/// Second difference of the mimic payoff around the diagonal; `Some(true)` when the
/// diagonal is a local maximum (within rounding).
fn soc_holds(env: &Environment, strategy: &Strategy, theta: f64) -> Result<Option<bool>> {
    let (lo, hi) = (theta * (1.0 - SOC_STEP), theta * (1.0 + SOC_STEP));
    let grid = strategy.grid();
    if lo < grid[0] || hi > grid[grid.len() - 1] {
        return Ok(None);
    }
    let pm = mimic_payoff(env, strategy, theta, lo)?;
    let p0 = mimic_payoff(env, strategy, theta, theta)?;
    let pp = mimic_payoff(env, strategy, theta, hi)?;
    let second = pp - 2.0 * p0 + pm;
    let noise = 64.0 * f64::EPSILON * (pp.abs() + 2.0 * p0.abs() + pm.abs());
    Ok(Some(second <= noise))
}

/// Scans every type against every candidate and reports the largest profitable deviation.
pub fn check_ic(env: &Environment, strategy: &Strategy, types: &[f64], candidates: &[f64]) -> Result<IcReport> {
    check_ic_with(env, strategy, types, candidates, DEFAULT_REL_EPSILON)
}

pub fn check_ic_with(
    env: &Environment,
    strategy: &Strategy,
    types: &[f64],
    candidates: &[f64],
    rel_epsilon: f64,
) -> Result<IcReport> {
    if types.is_empty() {
        return domain("no types to check");
    }
    let mut cands = candidates.to_vec();
    cands.push(0.0);
    let cols = candidate_table(env, strategy, &cands)?;
    let max_v = types
        .iter()
        .map(|&t| env.eval_benefit(t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let epsilon = rel_epsilon * max_v;

    let rows = types
        .par_iter()
        .map(|&t| Ok((best_in_row(env, strategy, t, &cols, &cands)?, soc_holds(env, strategy, t)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut worst = rows[0].0;
    let (mut soc_checked, mut soc_violations) = (0, 0);
    for (br, soc) in &rows {
        if br.gain > worst.gain {
            worst = *br;
        }
        if let Some(ok) = soc {
            soc_checked += 1;
            if !ok {
                soc_violations += 1;
            }
        }
    }
    Ok(IcReport {
        max_gain: worst.gain,
        worst,
        epsilon,
        types_checked: types.len(),
        candidates_checked: cands.len(),
        soc_checked,
        soc_violations,
        passed: worst.gain <= epsilon && soc_violations == 0,
    })
}

/// Like [`check_ic`] but turns a failed check into [`Error::IcViolation`].
pub fn verify_ic(env: &Environment, strategy: &Strategy, types: &[f64], candidates: &[f64]) -> Result<IcReport> {
    let report = check_ic(env, strategy, types, candidates)?;
    if report.passed {
        Ok(report)
    } else {
        Err(Error::IcViolation {
            theta: report.worst.theta,
            mimic: report.worst.mimic,
            gain: report.worst.gain,
        })
    }
}

/// [`verify_ic`] on the strategy grid against the default candidate grid.
pub fn verify_ic_default(env: &Environment, strategy: &Strategy) -> Result<IcReport> {
    verify_ic(env, strategy, strategy.grid(), &default_candidates(strategy))
}
