//! The separating-equilibrium strategy `A(θ)`.
//!
//! Three routes are available:
//! * closed form for isoelastic environments with power difficulty,
//! * cumulative quadrature of `s·B'/S` followed by `D⁻¹` for any multiplicative cost,
//! * direct integration of `A' = V'/C_a(A, θ)` for everything else.
//!
//! None of the solvers consume a type distribution: the equilibrium depends only on the
//! support `[0, θ̄]`.

use crate::counterexamples;
use crate::environment::{BenefitShape, CostSpec, DifficultySpec, Environment, TypeDomain};
use crate::error::{domain, Error, Result};
use crate::numeric::interp::LogLogHermite;
use crate::numeric::ode::{self, OdeOptions};
use crate::numeric::quadrature;

/// `C_a` below this value is treated as a singularity of the equilibrium ODE.
pub const SINGULAR_MARGINAL_COST: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Per-panel relative tolerance of the adaptive Simpson quadrature.
    pub quad_rtol: f64,
    /// Relative tolerance of the Dormand–Prince stepper.
    pub ode_rtol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            quad_rtol: 1e-12,
            ode_rtol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Integral,
    Ode,
    /// Built from a user-supplied function, e.g. a perturbed candidate.
    Supplied,
}

/// A strictly increasing strategy tabulated on a type grid, with log–log Hermite
/// interpolation between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    domain: TypeDomain,
    actions: Vec<f64>,
    slopes: Vec<f64>,
    interp: LogLogHermite,
    provenance: Provenance,
}

impl Strategy {
    fn from_parts(
        domain: TypeDomain,
        actions: Vec<f64>,
        slopes: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if actions.len() != domain.len() || slopes.len() != domain.len() {
            return domain_err("strategy arrays do not match the type grid");
        }
        if actions.iter().any(|a| !a.is_finite()) {
            return domain_err("strategy contains non-finite actions");
        }
        if actions.windows(2).any(|w| !(w[1] > w[0])) || !(actions[0] > 0.0) {
            return domain_err(
                "strategy is not positive and strictly increasing; the environment likely violates the single-crossing assumptions",
            );
        }
        let interp = LogLogHermite::new(domain.grid(), &actions, &slopes)?;
        Ok(Self {
            domain,
            actions,
            slopes,
            interp,
            provenance,
        })
    }

    /// Strategy given by `action(θ)` with derivative `slope(θ)`.
    pub fn from_fn(
        domain: TypeDomain,
        action: impl Fn(f64) -> f64,
        slope: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let actions = domain.grid().iter().map(|&t| action(t)).collect();
        let slopes = domain.grid().iter().map(|&t| slope(t)).collect();
        Self::from_parts(domain, actions, slopes, Provenance::Supplied)
    }

    /// The same strategy with every action multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return domain("scale factor must be positive");
        }
        Self::from_parts(
            self.domain.clone(),
            self.actions.iter().map(|a| a * factor).collect(),
            self.slopes.iter().map(|a| a * factor).collect(),
            Provenance::Supplied,
        )
    }

    pub fn domain(&self) -> &TypeDomain {
        &self.domain
    }

    pub fn grid(&self) -> &[f64] {
        self.domain.grid()
    }

    pub fn actions(&self) -> &[f64] {
        &self.actions
    }

    /// `A'(θ)` at the grid points.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `A(θ)` for `θ ∈ [0, θ_max]`; exact at grid points, `A(0) = 0`.
    pub fn action_at(&self, theta: f64) -> Result<f64> {
        if let Ok(i) = self
            .grid()
            .binary_search_by(|t| t.partial_cmp(&theta).unwrap_or(std::cmp::Ordering::Less))
        {
            return Ok(self.actions[i]);
        }
        self.interp.eval(theta)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.actions.windows(2).all(|w| w[1] > w[0])
    }
}

fn domain_err<T>(msg: &str) -> Result<T> {
    Err(Error::Domain(msg.to_string()))
}

/// Equilibrium costs `C(A(θᵢ), θᵢ)` on the strategy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCostCurve {
    pub theta: Vec<f64>,
    pub cost: Vec<f64>,
}

/// Isoelastic closed form: returns `(A(θ), C(A(θ), θ))` for `V = sθ^β`, `C = a^γ θ^{-σ}`.
pub fn closed_form_isoelastic(s: f64, beta: f64, sigma: f64, gamma: f64, theta: f64) -> Result<(f64, f64)> {
    for (name, v) in [("s", s), ("beta", beta), ("sigma", sigma), ("gamma", gamma)] {
        if !(v > 0.0) {
            return domain(format!("{name} must be positive, got {v}"));
        }
    }
    if !(theta >= 0.0) {
        return domain(format!("type must be nonnegative, got {theta}"));
    }
    let level = s * beta / (beta + sigma);
    let action = level.powf(1.0 / gamma) * theta.powf((beta + sigma) / gamma);
    let cost = level * theta.powf(beta);
    Ok((action, cost))
}

/// Closed-form strategy for an isoelastic environment with power difficulty.
pub fn closed_form_strategy(env: &Environment, dom: &TypeDomain) -> Result<Strategy> {
    let (beta, sigma) = env
        .isoelastic_exponents()
        .ok_or_else(|| Error::Domain("closed form needs power benefit and power strain".into()))?;
    let gamma = match env.multiplicative_parts() {
        Some((DifficultySpec::Power { gamma }, _)) => *gamma,
        _ => return domain("closed form needs a power difficulty"),
    };
    let s = env.stakes();
    let mut actions = Vec::with_capacity(dom.len());
    for &t in dom.grid() {
        actions.push(closed_form_isoelastic(s, beta, sigma, gamma, t)?.0);
    }
    let p = (beta + sigma) / gamma;
    let slopes = dom.grid().iter().zip(&actions).map(|(t, a)| p * a / t).collect();
    Strategy::from_parts(dom.clone(), actions, slopes, Provenance::ClosedForm)
}

fn check_domain(env: &Environment, dom: &TypeDomain) -> Result<()> {
    if dom.theta_bar() > env.theta_bar() {
        return domain("type domain extends beyond the environment's theta_bar");
    }
    if dom.is_empty() {
        return domain("type grid is empty");
    }
    Ok(())
}

fn slope_at(env: &Environment, theta: f64, action: f64) -> Result<f64> {
    let (ca, _) = env.eval_cost_partials(action, theta)?;
    Ok(env.benefit_derivative(theta)? / ca)
}

/// `D(A(θᵢ)) = s∫₀^θᵢ B'/S` on the grid, by cumulative adaptive quadrature.
pub fn difficulty_levels(env: &Environment, grid: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    let (_, strain) = env
        .multiplicative_parts()
        .ok_or_else(|| Error::Domain("difficulty levels need a multiplicative cost".into()))?;
    let shape = &env.benefit.shape;
    let integrand = |t: f64| match (shape.derivative(t), strain.value(t)) {
        (Ok(b), Ok(s)) => b / s,
        _ => f64::NAN,
    };
    let integral = quadrature::cumulative_from_zero(&integrand, grid, opts.quad_rtol)?;
    Ok(integral.into_iter().map(|i| env.stakes() * i).collect())
}

/// Solves a multiplicative environment through the integral construction and inversion of `D`.
pub fn solve_multiplicative(env: &Environment, dom: &TypeDomain) -> Result<Strategy> {
    solve_multiplicative_with(env, dom, &SolverOptions::default())
}

pub fn solve_multiplicative_with(env: &Environment, dom: &TypeDomain, opts: &SolverOptions) -> Result<Strategy> {
    check_domain(env, dom)?;
    let (difficulty, _) = env
        .multiplicative_parts()
        .ok_or_else(|| Error::Domain("integral construction needs a multiplicative cost".into()))?;
    let levels = difficulty_levels(env, dom.grid(), opts)?;
    let actions = levels
        .iter()
        .map(|&d| difficulty.inverse(d))
        .collect::<Result<Vec<_>>>()?;
    let slopes = dom
        .grid()
        .iter()
        .zip(&actions)
        .map(|(&t, &a)| slope_at(env, t, a))
        .collect::<Result<Vec<_>>>()?;
    Strategy::from_parts(dom.clone(), actions, slopes, Provenance::Integral)
}

/// Integrates `A' = V'(θ)/C_a(A, θ)` from the seed `(θ_start, A_start)` to every grid point.
pub fn solve_ode(env: &Environment, dom: &TypeDomain, theta_start: f64, action_start: f64) -> Result<Strategy> {
    solve_ode_with(env, dom, theta_start, action_start, &SolverOptions::default())
}

pub fn solve_ode_with(
    env: &Environment,
    dom: &TypeDomain,
    theta_start: f64,
    action_start: f64,
    opts: &SolverOptions,
) -> Result<Strategy> {
    check_domain(env, dom)?;
    if !(theta_start > 0.0) || !(action_start > 0.0) {
        return Err(Error::Singularity {
            theta: theta_start,
            action: action_start,
            reason: "the seed must lie strictly inside the positive quadrant".into(),
        });
    }
    let rhs = |theta: f64, action: f64| -> Result<f64> {
        let singular = |reason: String| Error::Singularity {
            theta,
            action,
            reason,
        };
        if !(action > 0.0) {
            return Err(singular("action left the positive half-line".into()));
        }
        let (ca, _) = env
            .eval_cost_partials(action, theta)
            .map_err(|e| singular(e.to_string()))?;
        if !(ca >= SINGULAR_MARGINAL_COST) {
            return Err(singular(format!("marginal cost {ca:e} is degenerate")));
        }
        Ok(env.benefit_derivative(theta)? / ca)
    };
    let ode_opts = OdeOptions {
        rtol: opts.ode_rtol,
        ..OdeOptions::default()
    };

    let grid = dom.grid();
    let split = grid.partition_point(|&t| t < theta_start);
    let below: Vec<f64> = grid[..split].iter().rev().copied().collect();
    let mut actions = ode::integrate(rhs, theta_start, action_start, &below, ode_opts)?;
    actions.reverse();
    actions.extend(ode::integrate(rhs, theta_start, action_start, &grid[split..], ode_opts)?);

    let slopes = grid
        .iter()
        .zip(&actions)
        .map(|(&t, &a)| rhs(t, a))
        .collect::<Result<Vec<_>>>()?;
    Strategy::from_parts(dom.clone(), actions, slopes, Provenance::Ode)
}

/// Seed for [`solve_ode`] at the first grid point.
///
/// Multiplicative costs fit `A ≈ cθ^p` through a two-point quadrature bootstrap; the
/// non-multiplicative families with a known power-law solution use it directly.
pub fn default_seed(env: &Environment, dom: &TypeDomain) -> Result<(f64, f64)> {
    let grid = dom.grid();
    let theta0 = *grid
        .first()
        .ok_or_else(|| Error::Seeding("empty type grid".into()))?;
    let s = env.stakes();
    let beta = match env.benefit.shape {
        BenefitShape::Isoelastic { beta } => Some(beta),
        _ => None,
    };
    match (&env.cost, beta) {
        (CostSpec::Multiplicative { difficulty, .. }, _) => {
            let theta1 = grid
                .get(1)
                .copied()
                .unwrap_or(theta0 * 2.0)
                .min(env.theta_bar());
            let levels = difficulty_levels(env, &[theta0, theta1], &SolverOptions::default())?;
            let a0 = difficulty.inverse(levels[0])?;
            let a1 = difficulty.inverse(levels[1])?;
            let p = (a1 / a0).ln() / (theta1 / theta0).ln();
            let c = a0 / theta0.powf(p);
            Ok((theta0, c * theta0.powf(p)))
        }
        (CostSpec::QuadCubic, Some(1.0)) => {
            Ok((theta0, counterexamples::cubic_coefficient(s)?.c * theta0))
        }
        (CostSpec::RatioCost, Some(1.0)) => {
            Ok((theta0, counterexamples::ratio_coefficient(s)?.c * theta0))
        }
        (CostSpec::MixedIsoelastic(m), Some(b)) => {
            let sol = counterexamples::mixed_coefficient(m, b, s)?;
            Ok((theta0, sol.c * theta0.powf(sol.alpha)))
        }
        _ => Err(Error::Seeding(
            "no asymptotic ansatz for this benefit/cost pair; call solve_ode with an explicit seed".into(),
        )),
    }
}

/// ODE route with the default seed.
pub fn solve_ode_seeded(env: &Environment, dom: &TypeDomain) -> Result<Strategy> {
    let (t0, a0) = default_seed(env, dom)?;
    solve_ode(env, dom, t0, a0)
}

/// Integral route for multiplicative costs, ODE route otherwise.
pub fn solve(env: &Environment, dom: &TypeDomain) -> Result<Strategy> {
    match env.cost {
        CostSpec::Multiplicative { .. } => solve_multiplicative(env, dom),
        _ => solve_ode_seeded(env, dom),
    }
}

pub fn equilibrium_cost(env: &Environment, strategy: &Strategy) -> Result<EquilibriumCostCurve> {
    let theta = strategy.grid().to_vec();
    let cost = theta
        .iter()
        .zip(strategy.actions())
        .map(|(&t, &a)| env.eval_cost(a, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(EquilibriumCostCurve { theta, cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{BenefitSpec, StrainSpec};
    use crate::numeric::log_space;
    use approx::assert_relative_eq;

    fn exp_strain_env(gamma: f64) -> Environment {
        Environment::new(
            BenefitSpec::isoelastic(1.0, 1.0).unwrap(),
            CostSpec::Multiplicative {
                difficulty: DifficultySpec::Power { gamma },
                strain: StrainSpec::Exponential,
            },
            1.0,
        )
        .unwrap()
    }

    fn unit_domain() -> TypeDomain {
        TypeDomain::from_grid(1.0, log_space(1e-3, 1.0, 200)).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let (a, c) = closed_form_isoelastic(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(a, 0.5);
        assert_relative_eq!(c, 0.5);
        assert_eq!(closed_form_isoelastic(1.0, 1.0, 1.0, 1.0, 0.0).unwrap(), (0.0, 0.0));
        let (a, c) = closed_form_isoelastic(2.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert_relative_eq!(a, 1.0);
        assert_relative_eq!(c, 1.0);
        assert!(closed_form_isoelastic(1.0, 1.0, 1.0, 1.0, -0.1).is_err());
        assert!(closed_form_isoelastic(1.0, 0.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn integral_route_examples() {
        let dom = TypeDomain::new(1.0).unwrap();
        let s = solve_multiplicative(&Environment::isoelastic(1.0, 1.0, 1.0, 2.0).unwrap(), &dom).unwrap();
        let oracle = closed_form_isoelastic(1.0, 1.0, 1.0, 2.0, 1.0).unwrap().0;
        assert_relative_eq!(s.action_at(1.0).unwrap(), oracle, max_relative = 1e-10);
        assert_relative_eq!(oracle, 0.5f64.sqrt(), max_relative = 1e-15);

        let s = solve_multiplicative(&Environment::isoelastic(1.0, 1.0, 1.0, 1.0).unwrap(), &dom).unwrap();
        // θ²/2 at θ = 0.5, read through the interpolant
        assert_relative_eq!(s.action_at(0.5).unwrap(), 0.125, max_relative = 1e-10);

        let s = solve_multiplicative(&exp_strain_env(1.0), &dom).unwrap();
        assert_relative_eq!(s.action_at(1.0).unwrap(), std::f64::consts::E - 1.0, max_relative = 1e-10);
        assert_eq!(s.provenance(), Provenance::Integral);
    }

    #[test]
    fn ode_route_examples() {
        let dom = unit_domain();
        let env = Environment::isoelastic(1.0, 1.0, 1.0, 1.0).unwrap();
        let s = solve_ode(&env, &dom, 1e-3, 0.5e-6).unwrap();
        assert_relative_eq!(s.action_at(1.0).unwrap(), 0.5, max_relative = 1e-8);
        assert_eq!(s.provenance(), Provenance::Ode);

        let quad = Environment::new(BenefitSpec::isoelastic(5.0, 1.0).unwrap(), CostSpec::QuadCubic, 1.0).unwrap();
        let s = solve_ode(&quad, &dom, 1e-3, 1e-3).unwrap();
        for (t, a) in s.grid().iter().zip(s.actions()) {
            assert!(((a - t) / t).abs() <= 1e-6);
        }
    }

    #[test]
    fn zero_seed_is_singular() {
        let env = Environment::isoelastic(1.0, 1.0, 1.0, 2.0).unwrap();
        let err = solve_ode(&env, &unit_domain(), 1e-3, 0.0).unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }));
    }

    #[test]
    fn degenerate_marginal_cost_is_singular() {
        // D = a^4 near a tiny seed drives C_a far below the threshold
        let env = Environment::isoelastic(1.0, 1.0, 0.5, 4.0).unwrap();
        let err = solve_ode(&env, &unit_domain(), 1e-3, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }), "{err:?}");
    }

    #[test]
    fn backward_and_forward_from_interior_seed() {
        let dom = unit_domain();
        let env = Environment::isoelastic(1.0, 1.0, 1.0, 1.0).unwrap();
        let s = solve_ode(&env, &dom, 0.5, 0.125).unwrap();
        for (t, a) in s.grid().iter().zip(s.actions()) {
            assert_relative_eq!(*a, t * t / 2.0, max_relative = 1e-7);
        }
    }

    #[test]
    fn equilibrium_cost_examples() {
        let dom = TypeDomain::new(1.0).unwrap();
        let env = Environment::isoelastic(1.0, 1.0, 1.0, 2.0).unwrap();
        let curve = equilibrium_cost(&env, &solve_multiplicative(&env, &dom).unwrap()).unwrap();
        assert_relative_eq!(*curve.cost.last().unwrap(), 0.5, max_relative = 1e-10);
        assert!(curve.cost[0] <= 1e-6);
        let env = Environment::isoelastic(3.0, 1.0, 1.0, 1.0).unwrap();
        let curve = equilibrium_cost(&env, &solve_multiplicative(&env, &dom).unwrap()).unwrap();
        assert_relative_eq!(*curve.cost.last().unwrap(), 1.5, max_relative = 1e-10);
    }

    #[test]
    fn solvers_agree_with_closed_form() {
        let dom = unit_domain();
        let set = [0.5, 1.0, 2.0];
        for &beta in &set {
            for &sigma in &set {
                for &gamma in &set {
                    let env = Environment::isoelastic(1.0, beta, sigma, gamma).unwrap();
                    let integral = solve_multiplicative(&env, &dom).unwrap();
                    let ode = solve_ode_seeded(&env, &dom).unwrap();
                    for (i, &t) in dom.grid().iter().enumerate() {
                        let exact = closed_form_isoelastic(1.0, beta, sigma, gamma, t).unwrap().0;
                        let ei = ((integral.actions()[i] - exact) / exact).abs();
                        let eo = ((ode.actions()[i] - exact) / exact).abs();
                        assert!(ei <= 1e-6, "integral ({beta},{sigma},{gamma}) at {t}: {ei:e}");
                        assert!(eo <= 1e-6, "ode ({beta},{sigma},{gamma}) at {t}: {eo:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn strategies_are_monotone_and_vanish_at_zero() {
        let dom = TypeDomain::new(1.0).unwrap();
        for env in [Environment::isoelastic(2.0, 0.5, 2.0, 0.5).unwrap(), exp_strain_env(3.0)] {
            let s = solve(&env, &dom).unwrap();
            assert!(s.is_strictly_increasing());
            assert!(s.actions()[0] < 1e-2 * s.actions().last().unwrap());
            assert_eq!(s.action_at(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn non_multiplicative_without_ansatz_needs_explicit_seed() {
        let env = Environment::new(BenefitSpec::isoelastic(1.0, 2.0).unwrap(), CostSpec::QuadCubic, 1.0).unwrap();
        assert!(matches!(
            default_seed(&env, &unit_domain()),
            Err(Error::Seeding(_))
        ));
    }

    #[test]
    fn difficulty_cancels_out_of_cost() {
        let dom = TypeDomain::new(1.0).unwrap();
        let base = exp_strain_env(1.0);
        let reference = equilibrium_cost(&base, &solve(&base, &dom).unwrap()).unwrap();
        for gamma in [0.5, 2.0, 4.0] {
            let env = exp_strain_env(gamma);
            let curve = equilibrium_cost(&env, &solve(&env, &dom).unwrap()).unwrap();
            for (a, b) in curve.cost.iter().zip(&reference.cost) {
                assert!(((a - b) / b).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn scaled_and_supplied_strategies() {
        let dom = unit_domain();
        let s = Strategy::from_fn(dom.clone(), |t| t * t * t, |t| 3.0 * t * t).unwrap();
        assert_eq!(s.provenance(), Provenance::Supplied);
        assert_relative_eq!(s.action_at(0.37).unwrap(), 0.37f64.powi(3), max_relative = 1e-12);
        let d = s.scaled(1.5).unwrap();
        assert_relative_eq!(d.action_at(0.37).unwrap(), 1.5 * 0.37f64.powi(3), max_relative = 1e-12);
        assert!(Strategy::from_fn(dom, |t| 1.0 - t, |_| -1.0).is_err());
    }
}
