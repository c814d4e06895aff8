//! Non-multiplicative costs whose waste is constant in type but moves with stakes.
//!
//! With `V = sθ`, the quadratic-plus-cubic cost `a²/θ + a³/θ²` has the linear equilibrium
//! `A = cθ` where `2c² + 3c³ = s`, giving `W = (1 + c)/(2 + 3c)`, which falls with `s`.
//! The ratio cost `a²/(θ + a)` gives `s = c²(2 + c)/(1 + c)²` and `W = (1 + c)/(2 + c)`,
//! which rises with `s`.

use rayon::prelude::*;

use crate::environment::{BenefitSpec, CostSpec, Environment, MixedTerms, TypeDomain};
use crate::equilibrium;
use crate::error::{domain, Error, Result};
use crate::ic_verify;
use crate::numeric::roots;
use crate::waste;

/// Residual bound every coefficient solve must meet.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Tolerance on the ratio condition `(β + σᵢ)/γᵢ = α`.
pub const RATIO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSolve {
    pub s: f64,
    pub c: f64,
    /// `|lhs(c) - rhs| / max(1, rhs)`.
    pub residual: f64,
}

/// Positive root of the increasing map `g(c) = target` with `g(0) = 0`.
fn solve_increasing<G>(g: G, target: f64) -> Result<f64>
where
    G: Fn(f64) -> (f64, f64),
{
    if !(target > 0.0) || !target.is_finite() {
        return domain(format!("coefficient equation needs a positive finite right side, got {target}"));
    }
    let f = |c: f64| {
        let (v, d) = g(c);
        (v - target, d)
    };
    let mut lo = 1e-9;
    while f(lo).0 >= 0.0 {
        lo /= 16.0;
        if lo < f64::MIN_POSITIVE {
            return Err(Error::Root(format!("cannot bracket the coefficient for {target:e}")));
        }
    }
    let hi = roots::expand_upper(&|c| f(c).0, lo, target.max(10.0))?;
    roots::newton_bracketed(f, lo, hi, 1e-15)
}

fn finish(s: f64, c: f64, lhs: f64, rhs: f64) -> Result<CoefficientSolve> {
    let residual = (lhs - rhs).abs() / rhs.max(1.0);
    if residual > RESIDUAL_TOL {
        return Err(Error::Root(format!("coefficient residual {residual:e} for s = {s:e}")));
    }
    Ok(CoefficientSolve { s, c, residual })
}

fn cubic_lhs(c: f64) -> f64 {
    2.0 * c * c + 3.0 * c * c * c
}

/// Root of `2c² + 3c³ = s`.
pub fn cubic_coefficient(s: f64) -> Result<CoefficientSolve> {
    let c = solve_increasing(|c| (cubic_lhs(c), 4.0 * c + 9.0 * c * c), s)?;
    finish(s, c, cubic_lhs(c), s)
}

fn ratio_lhs(c: f64) -> f64 {
    c * c * (2.0 + c) / ((1.0 + c) * (1.0 + c))
}

/// Root of `c²(2 + c)/(1 + c)² = s`.
pub fn ratio_coefficient(s: f64) -> Result<CoefficientSolve> {
    let c = solve_increasing(
        |c| {
            let q = 1.0 + c;
            // d/dc [c²(2+c)/(1+c)²] = c(c² + 3c + 4)/(1+c)³
            (ratio_lhs(c), c * (c * c + 3.0 * c + 4.0) / (q * q * q))
        },
        s,
    )?;
    finish(s, c, ratio_lhs(c), s)
}

/// `W = (1 + c)/(2 + 3c)` with `c` from [`cubic_coefficient`]; lies in `(1/3, 1/2)`.
pub fn waste_decreasing(s: f64) -> Result<f64> {
    let c = cubic_coefficient(s)?.c;
    Ok((1.0 + c) / (2.0 + 3.0 * c))
}

/// `W = (1 + c)/(2 + c)` with `c` from [`ratio_coefficient`]; lies in `(1/2, 1)`.
pub fn waste_increasing(s: f64) -> Result<f64> {
    let c = ratio_coefficient(s)?.c;
    Ok((1.0 + c) / (2.0 + c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedSolution {
    pub alpha: f64,
    pub c: f64,
    pub waste: f64,
    pub residual: f64,
}

/// Common ratio `(β + σᵢ)/γᵢ`, or an error naming the first term that breaks it.
fn common_ratio(terms: &MixedTerms, beta: f64) -> Result<f64> {
    let ratios: Vec<f64> = terms.terms().map(|(_, g, s)| (beta + s) / g).collect();
    let alpha = ratios[0];
    for (i, r) in ratios.iter().enumerate() {
        if (r - alpha).abs() > RATIO_TOL * alpha.max(1.0) {
            return Err(Error::RatioCondition {
                reason: format!("(beta + sigma_{i})/gamma_{i} = {r} differs from {alpha}"),
                isoelastic_waste: None,
            });
        }
    }
    Ok(alpha)
}

/// `α` and `c` for `A = cθ^α` under the mixed cost `Σ wᵢ a^{γᵢ} θ^{-σᵢ}` and `V = sθ^β`.
pub fn mixed_coefficient(terms: &MixedTerms, beta: f64, s: f64) -> Result<MixedSolution> {
    if !(beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    let alpha = common_ratio(terms, beta)?;
    let lhs = |c: f64| {
        terms.terms().fold((0.0, 0.0), |(v, d), (w, g, _)| {
            (v + alpha * w * g * c.powf(g), d + alpha * w * g * g * c.powf(g - 1.0))
        })
    };
    let rhs = s * beta;
    let c = solve_increasing(lhs, rhs)?;
    let sol = finish(s, c, lhs(c).0, rhs)?;
    let (num, den) = terms
        .terms()
        .fold((0.0, 0.0), |(n, d), (w, g, _)| (n + w * c.powf(g), d + w * g * c.powf(g)));
    Ok(MixedSolution {
        alpha,
        c,
        waste: beta / alpha * num / den,
        residual: sol.residual,
    })
}

/// Validated mixed construction. A cost whose `γᵢ` are all equal collapses to a single
/// isoelastic term; that case is rejected with the isoelastic waste attached.
pub fn mixed_isoelastic(weights: &[f64], gammas: &[f64], sigmas: &[f64], beta: f64, s: f64) -> Result<MixedSolution> {
    let terms = MixedTerms::new(weights.to_vec(), gammas.to_vec(), sigmas.to_vec())?;
    common_ratio(&terms, beta)?;
    let g0 = gammas[0];
    if gammas.iter().all(|g| (g - g0).abs() <= RATIO_TOL * g0.max(1.0)) {
        return Err(Error::RatioCondition {
            reason: "all gamma_i are equal, so the cost is a single isoelastic term".into(),
            isoelastic_waste: Some(beta / (beta + sigmas[0])),
        });
    }
    mixed_coefficient(&terms, beta, s)
}

/// `-∂ln C/∂ln V = -(C_θ/C)(V/V')` at action `a` and type `θ`.
pub fn cost_benefit_elasticity(env: &Environment, a: f64, theta: f64) -> Result<f64> {
    let (_, c_theta) = env.eval_cost_partials(a, theta)?;
    let c = env.eval_cost(a, theta)?;
    let v = env.eval_benefit(theta)?;
    let dv = env.benefit_derivative(theta)?;
    Ok(-c_theta / c * v / dv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    QuadCubic,
    Ratio,
}

impl Family {
    pub fn cost(self) -> CostSpec {
        match self {
            Family::QuadCubic => CostSpec::QuadCubic,
            Family::Ratio => CostSpec::RatioCost,
        }
    }

    pub fn coefficient(self, s: f64) -> Result<CoefficientSolve> {
        match self {
            Family::QuadCubic => cubic_coefficient(s),
            Family::Ratio => ratio_coefficient(s),
        }
    }

    pub fn waste(self, s: f64) -> Result<f64> {
        match self {
            Family::QuadCubic => waste_decreasing(s),
            Family::Ratio => waste_increasing(s),
        }
    }

    /// Open interval containing every attainable waste.
    pub fn waste_range(self) -> (f64, f64) {
        match self {
            Family::QuadCubic => (1.0 / 3.0, 0.5),
            Family::Ratio => (0.5, 1.0),
        }
    }

    /// Environment with `V = sθ` on `[0, θ̄]`.
    pub fn environment(self, s: f64, theta_bar: f64) -> Result<Environment> {
        Environment::new(BenefitSpec::isoelastic(s, 1.0)?, self.cost(), theta_bar)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckRow {
    pub s: f64,
    pub c: f64,
    pub closed_waste: f64,
    pub mean_waste: f64,
    /// `max - min` of the numerically solved `W(θ)`.
    pub waste_spread: f64,
    /// Largest `|W(θ) - closed form|` on the grid.
    pub max_error: f64,
    pub ic: ic_verify::IcReport,
    /// Spread of `-∂ln C/∂ln V` across types at a fixed action.
    pub fixed_action_elasticity_spread: f64,
}

impl CrosscheckRow {
    pub fn passed(&self, tol: f64) -> bool {
        self.waste_spread <= tol && self.max_error <= tol && self.ic.passed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub family: Family,
    pub rows: Vec<CrosscheckRow>,
    /// Waste moves in the family's direction along increasing `s`.
    pub monotone: bool,
}

impl CrosscheckReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.monotone && self.rows.iter().all(|r| r.passed(tol))
    }
}

/// Solves each stakes level by ODE from `A = c(s)θ`, checks IC and constancy of `W`, and
/// compares with the closed form.
pub fn crosscheck_nonmultiplicative(family: Family, stakes: &[f64], dom: &TypeDomain) -> Result<CrosscheckReport> {
    let mut sorted = stakes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows = sorted
        .par_iter()
        .map(|&s| {
            let env = family.environment(s, dom.theta_bar())?;
            let coef = family.coefficient(s)?;
            let t0 = dom.grid()[0];
            let strategy = equilibrium::solve_ode(&env, dom, t0, coef.c * t0)?;
            let profile = waste::waste_profile(&env, &strategy)?;
            let closed = family.waste(s)?;
            let max_error = profile
                .values
                .iter()
                .map(|w| (w - closed).abs())
                .fold(0.0, f64::max);
            let ic = ic_verify::check_ic(&env, &strategy, strategy.grid(), &ic_verify::default_candidates(&strategy))?;
            let elasticity = dom
                .grid()
                .iter()
                .map(|&t| cost_benefit_elasticity(&env, 0.5 * coef.c * dom.theta_bar(), t))
                .collect::<Result<Vec<_>>>()?;
            let hi = elasticity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = elasticity.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(CrosscheckRow {
                s,
                c: coef.c,
                closed_waste: closed,
                mean_waste: profile.mean,
                waste_spread: profile.spread,
                max_error,
                ic,
                fixed_action_elasticity_spread: hi - lo,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| match family {
        Family::QuadCubic => w[1].closed_waste < w[0].closed_waste && w[1].mean_waste < w[0].mean_waste,
        Family::Ratio => w[1].closed_waste > w[0].closed_waste && w[1].mean_waste > w[0].mean_waste,
    });
    Ok(CrosscheckReport { family, rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_space;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn coefficient_examples() {
        let r = cubic_coefficient(5.0).unwrap();
        assert_relative_eq!(r.c, 1.0, max_relative = 1e-14);
        assert!(r.residual <= RESIDUAL_TOL);

        // independent bisection oracle on [1e-6, 10]
        let oracle = roots::bisect(|c| cubic_lhs(c) - 0.0023, 1e-6, 10.0, 1e-15).unwrap();
        let r = cubic_coefficient(0.0023).unwrap();
        assert_relative_eq!(r.c, oracle, max_relative = 1e-12);
        assert!((2.0 * r.c.powi(2) + 3.0 * r.c.powi(3) - 0.0023).abs() <= 1e-12);

        let r = ratio_coefficient(0.75).unwrap();
        assert_relative_eq!(r.c, 1.0, max_relative = 1e-14);
        assert!(cubic_coefficient(0.0).is_err());
        assert!(ratio_coefficient(-1.0).is_err());
    }

    #[test]
    fn waste_examples() {
        assert_relative_eq!(waste_decreasing(5.0).unwrap(), 0.4, max_relative = 1e-14);
        assert_relative_eq!(waste_increasing(0.75).unwrap(), 2.0 / 3.0, max_relative = 1e-14);
        assert!((waste_decreasing(1e-10).unwrap() - 0.5).abs() < 1e-4);
        assert!((waste_decreasing(1e10).unwrap() - 1.0 / 3.0).abs() < 1e-3);
        assert!((waste_increasing(1e-10).unwrap() - 0.5).abs() < 1e-4);
        assert!((waste_increasing(1e10).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hundred_stakes_levels() {
        let ss = log_space(1e-3, 1e3, 100);
        let mut prev: Option<(f64, f64, f64, f64)> = None;
        for &s in &ss {
            let (a, b) = (cubic_coefficient(s).unwrap(), ratio_coefficient(s).unwrap());
            assert!(a.residual <= RESIDUAL_TOL && b.residual <= RESIDUAL_TOL);
            assert!(((cubic_lhs(a.c) - s) / s.max(1.0)).abs() <= 1e-12);
            assert!(((ratio_lhs(b.c) - s) / s.max(1.0)).abs() <= 1e-12);
            let (wd, wi) = (waste_decreasing(s).unwrap(), waste_increasing(s).unwrap());
            assert!(wd > 1.0 / 3.0 && wd < 0.5);
            assert!(wi > 0.5 && wi < 1.0);
            if let Some((ca, cb, pd, pi)) = prev {
                assert!(a.c > ca && b.c > cb && wd < pd && wi > pi);
            }
            prev = Some((a.c, b.c, wd, wi));
        }
    }

    #[test]
    fn mixed_examples() {
        let sol = mixed_isoelastic(&[1.0, 1.0], &[2.0, 3.0], &[1.0, 2.0], 1.0, 5.0).unwrap();
        assert_relative_eq!(sol.alpha, 1.0);
        assert_relative_eq!(sol.c, 1.0, max_relative = 1e-14);
        assert_relative_eq!(sol.waste, 0.4, max_relative = 1e-14);

        match mixed_isoelastic(&[1.0], &[2.0], &[1.0], 1.0, 5.0) {
            Err(Error::RatioCondition { isoelastic_waste: Some(w), .. }) => assert_relative_eq!(w, 0.5),
            other => panic!("expected redirect, got {other:?}"),
        }
        assert!(matches!(
            mixed_isoelastic(&[1.0, 2.0], &[1.0, 2.0], &[0.5, 2.0], 0.5, 1.0),
            Err(Error::RatioCondition { isoelastic_waste: None, .. })
        ));
    }

    #[test]
    fn mixed_matches_direct_solve() {
        let (w, g, sg, beta, s) = ([1.0, 2.0], [1.0, 2.0], [0.5, 1.5], 0.5, 3.0);
        let sol = mixed_isoelastic(&w, &g, &sg, beta, s).unwrap();
        // 1·(c + 4c²) = 0.5·s
        assert_relative_eq!(sol.c + 4.0 * sol.c * sol.c, 0.5 * s, max_relative = 1e-13);
        let env = Environment::new(
            BenefitSpec::isoelastic(s, beta).unwrap(),
            CostSpec::MixedIsoelastic(MixedTerms::new(w.to_vec(), g.to_vec(), sg.to_vec()).unwrap()),
            1.0,
        )
        .unwrap();
        let dom = TypeDomain::new(1.0).unwrap();
        let strat = equilibrium::solve(&env, &dom).unwrap();
        let p = waste::waste_profile(&env, &strat).unwrap();
        for v in &p.values {
            assert!((v - sol.waste).abs() <= 1e-6);
        }
    }

    #[test]
    fn crosscheck_directions() {
        let dom = TypeDomain::log_spaced(1.0, 256).unwrap();
        let r = crosscheck_nonmultiplicative(Family::QuadCubic, &[1.0, 5.0, 20.0], &dom).unwrap();
        assert!(r.passed(1e-6), "{r:?}");
        let five = r.rows.iter().find(|row| row.s == 5.0).unwrap();
        assert!((five.mean_waste - 0.4).abs() <= 1e-6);
        assert!(r.rows.iter().all(|row| row.fixed_action_elasticity_spread > 1e-3));

        let r = crosscheck_nonmultiplicative(Family::Ratio, &[0.2, 0.75, 5.0], &dom).unwrap();
        assert!(r.passed(1e-6), "{r:?}");
    }

    #[test]
    fn path_elasticity_constant_for_linear_strategy() {
        // along a = cθ the diagnostic reduces to (1 + 2c)/(1 + c) for the cubic family
        let s = 5.0;
        let env = Family::QuadCubic.environment(s, 1.0).unwrap();
        let c = cubic_coefficient(s).unwrap().c;
        for t in [0.1, 0.5, 1.0] {
            let e = cost_benefit_elasticity(&env, c * t, t).unwrap();
            assert_relative_eq!(e, (1.0 + 2.0 * c) / (1.0 + c), max_relative = 1e-12);
        }
        let at = |t| cost_benefit_elasticity(&env, 0.5, t).unwrap();
        assert!((at(0.1) - at(1.0)).abs() > 0.1);
    }

    proptest! {
        #[test]
        fn coefficients_increase_with_stakes(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            prop_assume!((a - b).abs() > 1e-9 * a.max(b));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(cubic_coefficient(lo).unwrap().c < cubic_coefficient(hi).unwrap().c);
            prop_assert!(ratio_coefficient(lo).unwrap().c < ratio_coefficient(hi).unwrap().c);
            prop_assert!(waste_decreasing(lo).unwrap() > waste_decreasing(hi).unwrap());
            prop_assert!(waste_increasing(lo).unwrap() < waste_increasing(hi).unwrap());
        }
    }
}
