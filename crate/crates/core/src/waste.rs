//! Waste ratio `W(θ) = C(A(θ), θ) / V(θ)` and the diagnostics built on it.

use rayon::prelude::*;

use crate::environment::{BenefitShape, DifficultySpec, Environment, StrainSpec, TypeDomain};
use crate::equilibrium::{self, EquilibriumCostCurve, Provenance, Strategy, SolverOptions};
use crate::error::{domain, Error, Result};
use crate::numeric::diff;
use crate::numeric::quadrature;

/// Absolute spread below which a profile counts as constant.
pub const CONSTANCY_TOL: f64 = 1e-6;

fn spread_and_mean(values: &[f64]) -> (f64, f64) {
    let (lo, hi, sum) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), &v| (lo.min(v), hi.max(v), s + v));
    (hi - lo, sum / values.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WasteProfile {
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
    pub mean: f64,
    /// `max - min` over the grid.
    pub spread: f64,
    pub is_constant: bool,
}

impl WasteProfile {
    fn from_values(theta: Vec<f64>, values: Vec<f64>) -> Self {
        let (spread, mean) = spread_and_mean(&values);
        Self {
            theta,
            values,
            mean,
            spread,
            is_constant: spread <= CONSTANCY_TOL,
        }
    }

    /// True when every value lies strictly inside `(0, 1)`.
    pub fn within_unit_interval(&self) -> bool {
        self.values.iter().all(|w| *w > 0.0 && *w < 1.0)
    }
}

/// `C(A(θ), θ) / V(θ)` for `θ > 0`.
pub fn waste_ratio(env: &Environment, strategy: &Strategy, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return domain("waste ratio is undefined at theta = 0");
    }
    let v = env.eval_benefit(theta)?;
    if !(v > 0.0) {
        return domain(format!("benefit vanishes at theta = {theta:e}"));
    }
    Ok(env.eval_cost(strategy.action_at(theta)?, theta)? / v)
}

/// Waste on the strategy grid. For equilibrium strategies of multiplicative environments the
/// first point comes from the integral form rather than a ratio of two tiny numbers.
pub fn waste_profile(env: &Environment, strategy: &Strategy) -> Result<WasteProfile> {
    let theta = strategy.grid().to_vec();
    let mut values = theta
        .iter()
        .map(|&t| waste_ratio(env, strategy, t))
        .collect::<Result<Vec<_>>>()?;
    if let (Some((_, strain)), true) = (
        env.multiplicative_parts(),
        strategy.provenance() != Provenance::Supplied,
    ) {
        values[0] = waste_integral_multiplicative(&env.benefit.shape, strain, theta[0])?;
    }
    Ok(WasteProfile::from_values(theta, values))
}

/// `β / (β + σ)`.
pub fn waste_isoelastic(beta: f64, sigma: f64) -> Result<f64> {
    if !(beta > 0.0) || !(sigma > 0.0) {
        return domain(format!("elasticities must be positive, got beta={beta}, sigma={sigma}"));
    }
    Ok(beta / (beta + sigma))
}

/// `(S(θ)/B(θ)) ∫₀^θ B'/S`; needs neither the strategy nor the difficulty.
pub fn waste_integral_multiplicative(shape: &BenefitShape, strain: &StrainSpec, theta: f64) -> Result<f64> {
    Ok(waste_integral_profile(shape, strain, &[theta])?[0])
}

/// [`waste_integral_multiplicative`] on a whole strictly increasing grid.
pub fn waste_integral_profile(shape: &BenefitShape, strain: &StrainSpec, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.iter().any(|t| !(*t > 0.0)) {
        return domain("waste is only defined for theta > 0");
    }
    let integrand = |t: f64| match (shape.derivative(t), strain.value(t)) {
        (Ok(b), Ok(s)) => b / s,
        _ => f64::NAN,
    };
    let integral = quadrature::cumulative_from_zero(&integrand, grid, SolverOptions::default().quad_rtol)?;
    grid.iter()
        .zip(integral)
        .map(|(&t, i)| Ok(strain.value(t)? / shape.value(t)? * i))
        .collect()
}

/// Relative elasticity `ρ(θ) = -d ln S / d ln V`.
pub fn relative_elasticity(env: &Environment, theta: f64) -> Result<f64> {
    let (_, strain) = env
        .multiplicative_parts()
        .ok_or_else(|| Error::Domain("relative elasticity needs a multiplicative cost".into()))?;
    if !(theta > 0.0) || theta > env.theta_bar() {
        return domain(format!("relative elasticity needs theta in (0, theta_bar], got {theta}"));
    }
    if !(env.benefit.shape.derivative(theta)? > 0.0) {
        return domain(format!("V' vanishes at theta = {theta:e}"));
    }
    Ok(strain.neg_log_derivative(theta)? * env.benefit.shape.value_over_derivative(theta)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityProfile {
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    pub mean: f64,
    pub spread: f64,
    pub is_constant: bool,
}

pub fn elasticity_profile(env: &Environment, grid: &[f64]) -> Result<ElasticityProfile> {
    let rho = grid
        .iter()
        .map(|&t| relative_elasticity(env, t))
        .collect::<Result<Vec<_>>>()?;
    let (spread, mean) = spread_and_mean(&rho);
    Ok(ElasticityProfile {
        theta: grid.to_vec(),
        rho,
        mean,
        spread,
        is_constant: spread <= CONSTANCY_TOL,
    })
}

/// Outcome of testing "constant waste ⇔ constant relative elasticity" on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub waste: WasteProfile,
    pub elasticity: ElasticityProfile,
    pub waste_constant: bool,
    pub elasticity_constant: bool,
    /// `|mean W - 1/(1 + mean ρ)|`.
    pub formula_gap: f64,
    /// Both flags agree.
    pub consistent: bool,
}

impl CharacterizationReport {
    /// When both are constant, `W` must equal `1/(1 + ρ)`.
    pub fn formula_holds(&self, tol: f64) -> bool {
        !(self.waste_constant && self.elasticity_constant) || self.formula_gap <= tol
    }
}

pub fn check_constant_waste(env: &Environment, dom: &TypeDomain) -> Result<CharacterizationReport> {
    let (_, strain) = env
        .multiplicative_parts()
        .ok_or_else(|| Error::Domain("the characterization needs a multiplicative cost".into()))?;
    let grid = dom.grid();
    let waste = WasteProfile::from_values(
        grid.to_vec(),
        waste_integral_profile(&env.benefit.shape, strain, grid)?,
    );
    let elasticity = elasticity_profile(env, grid)?;
    let formula_gap = (waste.mean - 1.0 / (1.0 + elasticity.mean)).abs();
    Ok(CharacterizationReport {
        waste_constant: waste.is_constant,
        elasticity_constant: elasticity.is_constant,
        consistent: waste.is_constant == elasticity.is_constant,
        formula_gap,
        waste,
        elasticity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub stakes: f64,
    pub gamma: f64,
    pub strategy: Strategy,
    pub cost: EquilibriumCostCurve,
    pub waste: WasteProfile,
}

impl SweepRun {
    pub fn max_action(&self) -> f64 {
        self.strategy.actions().iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub runs: Vec<SweepRun>,
    /// `max - min` of `W(θᵢ)` across the sweep, per grid point.
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
}

impl InvarianceReport {
    /// Ratio between the largest and smallest `max A` across runs.
    pub fn action_range_factor(&self) -> f64 {
        let maxes: Vec<f64> = self.runs.iter().map(SweepRun::max_action).collect();
        let hi = maxes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = maxes.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo
    }
}

/// Re-solves `env` for every `(s, γ)` pair (with `D(a) = a^γ`) and measures how much the
/// waste profile moves.
pub fn invariance_sweep(env: &Environment, dom: &TypeDomain, stakes: &[f64], gammas: &[f64]) -> Result<InvarianceReport> {
    if env.multiplicative_parts().is_none() {
        return domain("invariance sweep needs a multiplicative cost");
    }
    if stakes.is_empty() || gammas.is_empty() {
        return domain("sweep lists must be non-empty");
    }
    let pairs: Vec<(f64, f64)> = stakes
        .iter()
        .flat_map(|&s| gammas.iter().map(move |&g| (s, g)))
        .collect();
    let runs = pairs
        .par_iter()
        .map(|&(s, gamma)| {
            let e = env
                .with_stakes(s)?
                .with_difficulty(DifficultySpec::Power { gamma })?;
            let strategy = equilibrium::solve_multiplicative(&e, dom)?;
            let cost = equilibrium::equilibrium_cost(&e, &strategy)?;
            let waste = waste_profile(&e, &strategy)?;
            Ok(SweepRun {
                stakes: s,
                gamma,
                strategy,
                cost,
                waste,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let deviation: Vec<f64> = (0..dom.len())
        .map(|i| {
            let col = runs.iter().map(|r| r.waste.values[i]);
            let hi = col.clone().fold(f64::NEG_INFINITY, f64::max);
            let lo = col.fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .collect();
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
    Ok(InvarianceReport {
        runs,
        deviation,
        max_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    pub max_rel_error: f64,
    pub worst_theta: f64,
    pub points: usize,
}

/// Compares a grid derivative of `U(θ) = V(θ) - C(A(θ), θ)` with `-C_θ(A(θ), θ)`.
pub fn envelope_check(env: &Environment, strategy: &Strategy) -> Result<EnvelopeReport> {
    let grid = strategy.grid();
    let payoff = grid
        .iter()
        .zip(strategy.actions())
        .map(|(&t, &a)| Ok(env.eval_benefit(t)? - env.eval_cost(a, t)?))
        .collect::<Result<Vec<_>>>()?;
    let du = diff::grid_derivative(grid, &payoff);
    let mut report = EnvelopeReport {
        max_rel_error: 0.0,
        worst_theta: grid[0],
        points: grid.len(),
    };
    for ((&t, &a), d) in grid.iter().zip(strategy.actions()).zip(du) {
        let (_, ct) = env.eval_cost_partials(a, t)?;
        let err = ((d + ct) / ct).abs();
        if !(err <= report.max_rel_error) {
            report.max_rel_error = err;
            report.worst_theta = t;
        }
    }
    Ok(report)
}
