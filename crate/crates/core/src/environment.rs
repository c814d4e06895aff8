//! Signaling environments: benefit `V(θ) = s·B(θ)` and cost `C(a, θ)` with their partials.
//!
//! Environments are immutable once built. Constructors check structural well-formedness
//! (positive parameters, sane tables); whether a family actually satisfies the single-crossing
//! and monotonicity requirements is the job of [`validate_assumptions`], so deliberately
//! malformed environments can still be built and diagnosed.

use crate::error::{domain, Error, Result};
use crate::numeric::diff;
use crate::numeric::interp::Pchip;
use crate::numeric::log_space;
use crate::numeric::roots;

/// Relative tolerance used when a tabulated difficulty has to be inverted numerically.
pub const INVERSION_RTOL: f64 = 1e-10;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

fn fd<F: Fn(f64) -> Result<f64>>(f: F, x: f64, lo: f64, hi: f64) -> Result<f64> {
    let d = diff::central(|t| f(t).unwrap_or(f64::NAN), x, lo, hi);
    if d.is_finite() {
        Ok(d)
    } else {
        domain(format!("finite difference failed at {x:e}"))
    }
}

/// Shape `B` of the benefit function.
#[derive(Debug, Clone, PartialEq)]
pub enum BenefitShape {
    /// `B(θ) = θ^β`.
    Isoelastic { beta: f64 },
    /// `B(θ) = F(θ)^{N-1}` with `F(θ) = θ^k` on `[0, 1]`: the interim chance of beating
    /// `N - 1` rivals.
    PowerOfCdf { n: u32, k: f64 },
    /// Monotone cubic through `(θ, B(θ))` pairs starting at `(0, 0)`.
    Tabulated(Pchip),
}

impl BenefitShape {
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        match points.first() {
            Some(&(0.0, 0.0)) => {}
            _ => return domain("tabulated benefit must start at (0, 0)"),
        }
        let (x, y) = points.iter().copied().unzip();
        Ok(BenefitShape::Tabulated(Pchip::new(x, y)?))
    }

    fn check(&self) -> Result<()> {
        match self {
            BenefitShape::Isoelastic { beta } => positive("benefit elasticity beta", *beta),
            BenefitShape::PowerOfCdf { n, k } => {
                if *n < 2 {
                    return domain(format!("contestant count must be at least 2, got {n}"));
                }
                positive("distribution exponent k", *k)
            }
            BenefitShape::Tabulated(_) => Ok(()),
        }
    }

    /// Power-law exponent when the shape is isoelastic.
    pub fn elasticity(&self) -> Option<f64> {
        match self {
            BenefitShape::Isoelastic { beta } => Some(*beta),
            BenefitShape::PowerOfCdf { n, k } => Some(k * (*n as f64 - 1.0)),
            BenefitShape::Tabulated(_) => None,
        }
    }

    pub fn value(&self, theta: f64) -> Result<f64> {
        match self {
            BenefitShape::Tabulated(t) => t.eval(theta),
            _ => Ok(theta.powf(self.elasticity().expect("parametric"))),
        }
    }

    pub fn derivative(&self, theta: f64) -> Result<f64> {
        match self {
            BenefitShape::Tabulated(t) => fd(|x| t.eval(x), theta, t.first_x(), t.last_x()),
            _ => {
                let beta = self.elasticity().expect("parametric");
                Ok(beta * theta.powf(beta - 1.0))
            }
        }
    }

    /// `B(θ) / B'(θ)`; analytic for the power families.
    pub fn value_over_derivative(&self, theta: f64) -> Result<f64> {
        match self.elasticity() {
            Some(beta) => Ok(theta / beta),
            None => Ok(self.value(theta)? / self.derivative(theta)?),
        }
    }

    fn upper_limit(&self) -> f64 {
        match self {
            BenefitShape::Isoelastic { .. } => f64::INFINITY,
            BenefitShape::PowerOfCdf { .. } => 1.0,
            BenefitShape::Tabulated(t) => t.last_x(),
        }
    }
}

/// Benefit `V(θ) = s·B(θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenefitSpec {
    pub stakes: f64,
    pub shape: BenefitShape,
}

impl BenefitSpec {
    pub fn new(stakes: f64, shape: BenefitShape) -> Result<Self> {
        positive("stakes", stakes)?;
        shape.check()?;
        Ok(Self { stakes, shape })
    }

    pub fn isoelastic(stakes: f64, beta: f64) -> Result<Self> {
        Self::new(stakes, BenefitShape::Isoelastic { beta })
    }
}

/// Type-independent part `D(a)` of a multiplicative cost.
#[derive(Debug, Clone, PartialEq)]
pub enum DifficultySpec {
    /// `D(a) = a^γ`.
    Power { gamma: f64 },
    /// Monotone cubic through `(a, D(a))` starting at `(0, 0)`.
    Tabulated(Pchip),
}

impl DifficultySpec {
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        match points.first() {
            Some(&(0.0, 0.0)) => {}
            _ => return domain("tabulated difficulty must start at (0, 0)"),
        }
        let (x, y) = points.iter().copied().unzip();
        Ok(DifficultySpec::Tabulated(Pchip::new(x, y)?))
    }

    fn check(&self) -> Result<()> {
        match self {
            DifficultySpec::Power { gamma } => positive("difficulty exponent gamma", *gamma),
            DifficultySpec::Tabulated(_) => Ok(()),
        }
    }

    pub fn value(&self, a: f64) -> Result<f64> {
        match self {
            DifficultySpec::Power { gamma } => Ok(a.powf(*gamma)),
            DifficultySpec::Tabulated(t) => t.eval(a),
        }
    }

    pub fn derivative(&self, a: f64) -> Result<f64> {
        match self {
            DifficultySpec::Power { gamma } => Ok(gamma * a.powf(gamma - 1.0)),
            DifficultySpec::Tabulated(t) => fd(|x| t.eval(x), a, t.first_x(), t.last_x()),
        }
    }

    /// `D⁻¹(d)`: analytic for the power family, bisection otherwise.
    pub fn inverse(&self, d: f64) -> Result<f64> {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::Inversion(format!("cannot invert difficulty at {d:e}")));
        }
        match self {
            DifficultySpec::Power { gamma } => Ok(d.powf(1.0 / gamma)),
            DifficultySpec::Tabulated(t) => {
                if d == 0.0 {
                    return Ok(0.0);
                }
                let hi = t.last_x();
                let top = t.eval(hi)?;
                if d > top {
                    return Err(Error::Inversion(format!(
                        "difficulty level {d:e} exceeds tabulated maximum {top:e}"
                    )));
                }
                roots::bisect(|a| t.eval(a).unwrap_or(f64::NAN) - d, 0.0, hi, INVERSION_RTOL)
                    .map_err(|e| Error::Inversion(e.to_string()))
            }
        }
    }
}

/// Type-dependent part `S(θ)` of a multiplicative cost.
#[derive(Debug, Clone, PartialEq)]
pub enum StrainSpec {
    /// `S(θ) = θ^{-σ}`; infinite at zero.
    Power { sigma: f64 },
    /// `S(θ) = e^{-θ}`.
    Exponential,
    /// Monotone cubic through `(θ, S(θ))` starting at `θ = 0` with finite positive values.
    Tabulated(Pchip),
}

impl StrainSpec {
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        match points.first() {
            Some(&(0.0, _)) => {}
            _ => return domain("tabulated strain must start at theta = 0"),
        }
        if points.iter().any(|p| !(p.1 > 0.0)) {
            return domain("tabulated strain values must be positive");
        }
        let (x, y) = points.iter().copied().unzip();
        Ok(StrainSpec::Tabulated(Pchip::new(x, y)?))
    }

    fn check(&self) -> Result<()> {
        match self {
            StrainSpec::Power { sigma } => positive("strain elasticity sigma", *sigma),
            _ => Ok(()),
        }
    }

    pub fn value(&self, theta: f64) -> Result<f64> {
        match self {
            StrainSpec::Power { sigma } => {
                if theta == 0.0 {
                    Ok(f64::INFINITY)
                } else {
                    Ok(theta.powf(-sigma))
                }
            }
            StrainSpec::Exponential => Ok((-theta).exp()),
            StrainSpec::Tabulated(t) => t.eval(theta),
        }
    }

    pub fn derivative(&self, theta: f64) -> Result<f64> {
        match self {
            StrainSpec::Power { sigma } => Ok(-sigma * theta.powf(-sigma - 1.0)),
            StrainSpec::Exponential => Ok(-(-theta).exp()),
            StrainSpec::Tabulated(t) => fd(|x| t.eval(x), theta, t.first_x(), t.last_x()),
        }
    }

    /// `-S'(θ)/S(θ)`. Tabulated strains use a central difference of `ln S` in `ln θ`.
    pub fn neg_log_derivative(&self, theta: f64) -> Result<f64> {
        match self {
            StrainSpec::Power { sigma } => Ok(sigma / theta),
            StrainSpec::Exponential => Ok(1.0),
            StrainSpec::Tabulated(t) => {
                let h = 1e-5;
                let up = (theta * (1.0 + h)).min(t.last_x());
                let down = theta * (1.0 - h);
                let dlog = (t.eval(up)?.ln() - t.eval(down)?.ln()) / (up.ln() - down.ln());
                Ok(-dlog / theta)
            }
        }
    }

    fn upper_limit(&self) -> f64 {
        match self {
            StrainSpec::Tabulated(t) => t.last_x(),
            _ => f64::INFINITY,
        }
    }
}

/// Weighted sum of isoelastic cost terms `Σ wᵢ a^{γᵢ} θ^{-σᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTerms {
    pub weights: Vec<f64>,
    pub gammas: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl MixedTerms {
    pub fn new(weights: Vec<f64>, gammas: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != gammas.len() || weights.len() != sigmas.len() {
            return domain("mixed cost needs equally many weights, gammas and sigmas");
        }
        for ((w, g), s) in weights.iter().zip(&gammas).zip(&sigmas) {
            positive("mixed weight", *w)?;
            positive("mixed gamma", *g)?;
            positive("mixed sigma", *s)?;
        }
        Ok(Self {
            weights,
            gammas,
            sigmas,
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.weights
            .iter()
            .zip(&self.gammas)
            .zip(&self.sigmas)
            .map(|((w, g), s)| (*w, *g, *s))
    }
}

/// Cost `C(a, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec {
    /// `C = D(a)·S(θ)`.
    Multiplicative {
        difficulty: DifficultySpec,
        strain: StrainSpec,
    },
    /// `C = a²/θ + a³/θ²`.
    QuadCubic,
    /// `C = a²/(θ + a)`.
    RatioCost,
    /// `C = Σ wᵢ a^{γᵢ} θ^{-σᵢ}`.
    MixedIsoelastic(MixedTerms),
}

impl CostSpec {
    pub fn isoelastic(gamma: f64, sigma: f64) -> Self {
        CostSpec::Multiplicative {
            difficulty: DifficultySpec::Power { gamma },
            strain: StrainSpec::Power { sigma },
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            CostSpec::Multiplicative { difficulty, strain } => {
                difficulty.check()?;
                strain.check()
            }
            _ => Ok(()),
        }
    }

    fn upper_limit(&self) -> f64 {
        match self {
            CostSpec::Multiplicative { strain, .. } => strain.upper_limit(),
            _ => f64::INFINITY,
        }
    }
}

/// A signaling environment on the type space `[0, θ̄]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub benefit: BenefitSpec,
    pub cost: CostSpec,
    theta_bar: f64,
}

impl Environment {
    /// `theta_bar` may be `f64::INFINITY` for purely parametric families.
    pub fn new(benefit: BenefitSpec, cost: CostSpec, theta_bar: f64) -> Result<Self> {
        benefit.shape.check()?;
        positive("stakes", benefit.stakes)?;
        cost.check()?;
        if !(theta_bar > 0.0) {
            return domain(format!("theta_bar must be positive, got {theta_bar}"));
        }
        let limit = benefit.shape.upper_limit().min(cost.upper_limit());
        if theta_bar > limit {
            return domain(format!(
                "theta_bar {theta_bar} exceeds the range {limit} on which the primitives are defined"
            ));
        }
        Ok(Self {
            benefit,
            cost,
            theta_bar,
        })
    }

    /// Isoelastic environment `V = sθ^β`, `C = a^γ θ^{-σ}` on `[0, 1]`.
    pub fn isoelastic(stakes: f64, beta: f64, sigma: f64, gamma: f64) -> Result<Self> {
        Self::new(
            BenefitSpec::isoelastic(stakes, beta)?,
            CostSpec::isoelastic(gamma, sigma),
            1.0,
        )
    }

    pub fn theta_bar(&self) -> f64 {
        self.theta_bar
    }

    pub fn stakes(&self) -> f64 {
        self.benefit.stakes
    }

    pub fn with_stakes(&self, stakes: f64) -> Result<Self> {
        let mut env = self.clone();
        positive("stakes", stakes)?;
        env.benefit.stakes = stakes;
        Ok(env)
    }

    /// Same environment with the difficulty replaced; only for multiplicative costs.
    pub fn with_difficulty(&self, difficulty: DifficultySpec) -> Result<Self> {
        match &self.cost {
            CostSpec::Multiplicative { strain, .. } => {
                difficulty.check()?;
                let mut env = self.clone();
                env.cost = CostSpec::Multiplicative {
                    difficulty,
                    strain: strain.clone(),
                };
                Ok(env)
            }
            _ => domain("difficulty is only defined for multiplicative costs"),
        }
    }

    pub fn multiplicative_parts(&self) -> Option<(&DifficultySpec, &StrainSpec)> {
        match &self.cost {
            CostSpec::Multiplicative { difficulty, strain } => Some((difficulty, strain)),
            _ => None,
        }
    }

    /// `(β, σ)` when both benefit and strain are power laws.
    pub fn isoelastic_exponents(&self) -> Option<(f64, f64)> {
        let beta = self.benefit.shape.elasticity()?;
        match self.multiplicative_parts()? {
            (_, StrainSpec::Power { sigma }) => Some((beta, *sigma)),
            _ => None,
        }
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        if theta >= 0.0 && theta <= self.theta_bar {
            Ok(())
        } else {
            domain(format!("type {theta} outside [0, {}]", self.theta_bar))
        }
    }

    /// `V(θ) = s·B(θ)`.
    pub fn eval_benefit(&self, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.benefit.stakes * self.benefit.shape.value(theta)?)
    }

    /// `V'(θ)`.
    pub fn benefit_derivative(&self, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.benefit.stakes * self.benefit.shape.derivative(theta)?)
    }

    /// `C(a, θ)`, possibly `+∞` at `θ = 0`. Zero action always costs exactly zero.
    pub fn eval_cost(&self, a: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if !(a >= 0.0) {
            return domain(format!("action must be nonnegative, got {a}"));
        }
        if a == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.cost {
            CostSpec::Multiplicative { difficulty, strain } => {
                let s = strain.value(theta)?;
                let d = difficulty.value(a)?;
                if s.is_infinite() {
                    f64::INFINITY
                } else {
                    d * s
                }
            }
            CostSpec::QuadCubic => {
                if theta == 0.0 {
                    f64::INFINITY
                } else {
                    let r = a / theta;
                    a * r + a * r * r
                }
            }
            CostSpec::RatioCost => a * a / (theta + a),
            CostSpec::MixedIsoelastic(m) => {
                if theta == 0.0 {
                    f64::INFINITY
                } else {
                    m.terms().map(|(w, g, s)| w * a.powf(g) * theta.powf(-s)).sum()
                }
            }
        })
    }

    /// `(C_a, C_θ)` on the open quadrant `a > 0, θ > 0`.
    pub fn eval_cost_partials(&self, a: f64, theta: f64) -> Result<(f64, f64)> {
        if !(a > 0.0) || !(theta > 0.0) {
            return domain(format!("partials need a > 0 and theta > 0, got ({a}, {theta})"));
        }
        self.check_theta(theta)?;
        Ok(match &self.cost {
            CostSpec::Multiplicative { difficulty, strain } => (
                difficulty.derivative(a)? * strain.value(theta)?,
                difficulty.value(a)? * strain.derivative(theta)?,
            ),
            CostSpec::QuadCubic => {
                let r = a / theta;
                (2.0 * r + 3.0 * r * r, -r * r - 2.0 * r * r * r)
            }
            CostSpec::RatioCost => {
                let t = theta + a;
                (a * (a + 2.0 * theta) / (t * t), -a * a / (t * t))
            }
            CostSpec::MixedIsoelastic(m) => m.terms().fold((0.0, 0.0), |(ca, ct), (w, g, s)| {
                let term = w * a.powf(g) * theta.powf(-s);
                (ca + g * term / a, ct - s * term / theta)
            }),
        })
    }

    /// Mimicry payoff `V(θ̂) - C(A, θ)` with extended-real semantics (`-∞` for infinite cost).
    pub fn payoff(&self, perceived: f64, action: f64, theta: f64) -> Result<f64> {
        Ok(self.eval_benefit(perceived)? - self.eval_cost(action, theta)?)
    }
}

/// Type space `[0, θ̄]` with a strictly increasing evaluation grid in `(0, θ̄]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeDomain {
    theta_bar: f64,
    grid: Vec<f64>,
}

impl TypeDomain {
    pub const DEFAULT_POINTS: usize = 1024;
    /// Ratio between the first grid point and `θ̄` for log-spaced grids.
    pub const LOWER_FRACTION: f64 = 1e-6;

    /// `m` log-spaced points from `θ̄·10⁻⁶` to `θ̄`.
    pub fn log_spaced(theta_bar: f64, m: usize) -> Result<Self> {
        if !theta_bar.is_finite() || !(theta_bar > 0.0) {
            return domain("grid-based solving needs a finite positive theta_bar");
        }
        if m < 2 {
            return domain("a type grid needs at least two points");
        }
        Ok(Self {
            theta_bar,
            grid: log_space(theta_bar * Self::LOWER_FRACTION, theta_bar, m),
        })
    }

    /// Default 1024-point log-spaced grid.
    pub fn new(theta_bar: f64) -> Result<Self> {
        Self::log_spaced(theta_bar, Self::DEFAULT_POINTS)
    }

    pub fn from_grid(theta_bar: f64, grid: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return domain("type grid is empty");
        }
        if !(grid[0] > 0.0) {
            return domain("first grid point must be strictly positive");
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("type grid must be strictly increasing");
        }
        if grid[grid.len() - 1] > theta_bar {
            return domain("type grid exceeds theta_bar");
        }
        Ok(Self { theta_bar, grid })
    }

    pub fn theta_bar(&self) -> f64 {
        self.theta_bar
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Grid with `factor - 1` extra log-spaced points inside every interval; endpoints match.
    pub fn refined(&self, factor: usize) -> Vec<f64> {
        let factor = factor.max(1);
        let mut out = Vec::with_capacity(factor * self.grid.len());
        for w in self.grid.windows(2) {
            let ratio = (w[1] / w[0]).ln() / factor as f64;
            out.push(w[0]);
            for j in 1..factor {
                out.push(w[0] * (ratio * j as f64).exp());
            }
        }
        out.extend(self.grid.last());
        out
    }
}

/// Location of the worst observation for one assumption check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub action: Option<f64>,
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub points_checked: usize,
    /// Violating point when failed, least comfortable point when passed.
    pub worst: Option<Witness>,
    /// Points whose sign could not be resolved above floating-point noise.
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_V0: &str = "V(0)=0";
pub const CHECK_VPRIME: &str = "V'>0";
pub const CHECK_C0: &str = "C(0,theta)=0";
pub const CHECK_CA: &str = "C_a>0";
pub const CHECK_CATHETA: &str = "C_a_theta<0";

/// Checks the standing assumptions on the type grid (at most 64 points) times 32 log-spaced
/// actions in `[10⁻³, 10]`.
pub fn validate_assumptions(env: &Environment, domain: &TypeDomain) -> ValidationReport {
    let thetas = subsample(domain.grid(), 64);
    let mut a_hi: f64 = 10.0;
    if let Some((DifficultySpec::Tabulated(t), _)) = env.multiplicative_parts() {
        a_hi = a_hi.min(t.last_x());
    }
    let actions = log_space(1e-3, a_hi, 32);
    validate_assumptions_on(env, &thetas, &actions)
}

fn subsample(grid: &[f64], max: usize) -> Vec<f64> {
    if grid.len() <= max {
        return grid.to_vec();
    }
    (0..max)
        .map(|i| grid[i * (grid.len() - 1) / (max - 1)])
        .collect()
}

/// Assumption checks on an explicit `(a, θ)` product grid.
pub fn validate_assumptions_on(env: &Environment, thetas: &[f64], actions: &[f64]) -> ValidationReport {
    let mut checks = Vec::new();

    let v0 = env.eval_benefit(0.0);
    checks.push(AssumptionCheck {
        name: CHECK_V0,
        passed: matches!(v0, Ok(v) if v == 0.0),
        points_checked: 1,
        worst: Some(Witness {
            action: None,
            theta: 0.0,
            value: v0.unwrap_or(f64::NAN),
        }),
        unresolved: 0,
    });

    // smaller is worse for V' and C_a; larger is worse for C(0,θ) and C_aθ
    let mut vp = Tracker::new(CHECK_VPRIME, false);
    let mut c0 = Tracker::new(CHECK_C0, true);
    for &t in thetas {
        vp.observe(None, t, env.benefit_derivative(t), |v| v > 0.0);
        c0.observe(None, t, env.eval_cost(0.0, t), |v| v == 0.0);
    }
    checks.push(vp.finish());
    checks.push(c0.finish());

    let mut ca = Tracker::new(CHECK_CA, false);
    let mut cat = Tracker::new(CHECK_CATHETA, true);
    for &t in thetas {
        for &a in actions {
            ca.observe(Some(a), t, env.eval_cost_partials(a, t).map(|p| p.0), |v| v > 0.0);
            match cross_partial(env, a, t) {
                Ok((value, noise)) => {
                    if value.abs() <= noise {
                        cat.unresolved += 1;
                        cat.checked += 1;
                    } else {
                        cat.observe(Some(a), t, Ok(value), |v| v < 0.0);
                    }
                }
                Err(e) => cat.observe(Some(a), t, Err(e), |_| true),
            }
        }
    }
    checks.push(ca.finish());
    checks.push(cat.finish());
    ValidationReport { checks }
}

/// Central difference of `C_a` in `θ` with relative step 10⁻⁴, plus its rounding-noise level.
fn cross_partial(env: &Environment, a: f64, theta: f64) -> Result<(f64, f64)> {
    let h = 1e-4 * theta;
    let (up, down) = if theta + h <= env.theta_bar() {
        (theta + h, theta - h)
    } else {
        (theta, theta - 2.0 * h)
    };
    let cu = env.eval_cost_partials(a, up)?.0;
    let cd = env.eval_cost_partials(a, down)?.0;
    let noise = 8.0 * f64::EPSILON * (cu.abs() + cd.abs()) / (up - down);
    Ok(((cu - cd) / (up - down), noise))
}

struct Tracker {
    name: &'static str,
    larger_is_worse: bool,
    passed: bool,
    checked: usize,
    unresolved: usize,
    worst: Option<Witness>,
    violation: Option<Witness>,
}

impl Tracker {
    fn new(name: &'static str, larger_is_worse: bool) -> Self {
        Self {
            name,
            larger_is_worse,
            passed: true,
            checked: 0,
            unresolved: 0,
            worst: None,
            violation: None,
        }
    }

    fn observe(&mut self, a: Option<f64>, theta: f64, value: Result<f64>, ok: impl Fn(f64) -> bool) {
        self.checked += 1;
        let v = value.unwrap_or(f64::NAN);
        let w = Witness {
            action: a,
            theta,
            value: v,
        };
        let good = v.is_finite() && ok(v);
        let worse = |cur: &Option<Witness>| match cur {
            None => true,
            Some(c) => {
                if self.larger_is_worse {
                    v > c.value || v.is_nan()
                } else {
                    v < c.value || v.is_nan()
                }
            }
        };
        if !good {
            self.passed = false;
            if worse(&self.violation) {
                self.violation = Some(w);
            }
        } else if worse(&self.worst) {
            self.worst = Some(w);
        }
    }

    fn finish(self) -> AssumptionCheck {
        AssumptionCheck {
            name: self.name,
            passed: self.passed,
            points_checked: self.checked,
            worst: self.violation.or(self.worst),
            unresolved: self.unresolved,
        }
    }
}
