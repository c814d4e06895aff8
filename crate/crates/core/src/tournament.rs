//! Winner-take-all signaling tournament and the Tullock contest it is compared against.

use rayon::prelude::*;

use crate::environment::{BenefitShape, BenefitSpec, CostSpec, DifficultySpec, Environment, StrainSpec};
use crate::error::{domain, Result};
use crate::rng;

/// `N` contestants with types drawn from `F(θ) = θ^k` on `[0, 1]`, one prize worth `s`,
/// and cost `D(a)·θ^{-σ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TournamentSpec {
    pub prize: f64,
    pub n: u32,
    pub k: f64,
    pub sigma: f64,
    pub difficulty: DifficultySpec,
}

impl TournamentSpec {
    pub fn new(prize: f64, n: u32, k: f64, sigma: f64, difficulty: DifficultySpec) -> Result<Self> {
        if n < 2 {
            return domain(format!("a tournament needs at least 2 contestants, got {n}"));
        }
        for (name, v) in [("prize", prize), ("k", k), ("sigma", sigma)] {
            if !(v > 0.0) || !v.is_finite() {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self {
            prize,
            n,
            k,
            sigma,
            difficulty,
        })
    }

    /// Linear difficulty `D(a) = a`.
    pub fn linear(prize: f64, n: u32, k: f64, sigma: f64) -> Result<Self> {
        Self::new(prize, n, k, sigma, DifficultySpec::Power { gamma: 1.0 })
    }

    /// Benefit elasticity `k(N - 1)` of the interim winning chance.
    pub fn beta(&self) -> f64 {
        self.k * (self.n as f64 - 1.0)
    }

    /// The single-contestant signaling environment on `[0, 1]`.
    pub fn environment(&self) -> Result<Environment> {
        Environment::new(
            BenefitSpec::new(self.prize, BenefitShape::PowerOfCdf { n: self.n, k: self.k })?,
            CostSpec::Multiplicative {
                difficulty: self.difficulty.clone(),
                strain: StrainSpec::Power { sigma: self.sigma },
            },
            1.0,
        )
    }

    /// Equilibrium signaling cost of type `θ`: `D(A(θ))·θ^{-σ}` with
    /// `D(A(θ)) = sβ/(β+σ)·θ^{β+σ}`.
    pub fn equilibrium_cost(&self, theta: f64) -> Result<f64> {
        if theta == 0.0 {
            return Ok(0.0);
        }
        let beta = self.beta();
        let level = self.prize * beta / (beta + self.sigma) * theta.powf(beta + self.sigma);
        let action = self.difficulty.inverse(level)?;
        Ok(self.difficulty.value(action)? * theta.powf(-self.sigma))
    }
}

/// `V(θ) = s·θ^{k(N-1)}`.
pub fn tournament_benefit(spec: &TournamentSpec, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return domain(format!("tournament types lie in [0, 1], got {theta}"));
    }
    Ok(spec.prize * theta.powf(spec.beta()))
}

/// `k(N-1) / (k(N-1) + σ)`.
pub fn tournament_waste(n: u32, k: f64, sigma: f64) -> Result<f64> {
    if n < 2 {
        return domain(format!("a tournament needs at least 2 contestants, got {n}"));
    }
    if !(k > 0.0) || !(sigma > 0.0) {
        return domain(format!("k and sigma must be positive, got k={k}, sigma={sigma}"));
    }
    let b = k * (n as f64 - 1.0);
    Ok(b / (b + sigma))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub seed: u64,
    /// Mean over trials of (total signaling cost) / prize.
    pub ratio: f64,
    pub ratio_se: Option<f64>,
    pub mean_cost_per_capita: f64,
    pub cost_se: Option<f64>,
    /// Mean interim benefit `V(θ)` per contestant.
    pub mean_benefit_per_capita: f64,
    pub benefit_se: Option<f64>,
    /// Realized prize per contestant; always `s/N`.
    pub realized_benefit_per_capita: f64,
    /// Share of trials won by each contestant index.
    pub win_frequency: Vec<f64>,
    /// Closed-form waste the ratio estimates.
    pub expected_ratio: f64,
}

impl MonteCarloReport {
    /// `|ratio - expected| / SE`; `None` when the SE is undefined or zero.
    pub fn z_score(&self) -> Option<f64> {
        self.ratio_se
            .filter(|se| *se > 0.0)
            .map(|se| (self.ratio - self.expected_ratio).abs() / se)
    }
}

struct TrialOutcome {
    cost: f64,
    benefit: f64,
    winner: usize,
}

fn run_trial(spec: &TournamentSpec, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let mut r = rng::substream(seed, trial);
    let inv_k = 1.0 / spec.k;
    let (mut cost, mut benefit) = (0.0, 0.0);
    let mut winner = (0usize, f64::NEG_INFINITY);
    for i in 0..spec.n as usize {
        let theta = rng::uniform(&mut r).powf(inv_k);
        cost += spec.equilibrium_cost(theta)?;
        benefit += tournament_benefit(spec, theta)?;
        // strict comparison keeps the lowest index on ties
        if theta > winner.1 {
            winner = (i, theta);
        }
    }
    Ok(TrialOutcome {
        cost,
        benefit,
        winner: winner.0,
    })
}

/// Draws `trials × N` types and plays the separating strategy; the prize goes to the highest
/// type, which is also the highest action.
pub fn simulate_tournament(spec: &TournamentSpec, trials: u64, seed: u64) -> Result<MonteCarloReport> {
    if trials == 0 {
        return domain("at least one trial is required");
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(spec, seed, t))
        .collect::<Result<Vec<_>>>()?;
    let n = spec.n as f64;
    let fractions: Vec<f64> = outcomes.iter().map(|o| o.cost / spec.prize).collect();
    let costs: Vec<f64> = outcomes.iter().map(|o| o.cost / n).collect();
    let benefits: Vec<f64> = outcomes.iter().map(|o| o.benefit / n).collect();
    let (ratio, ratio_se) = rng::mean_and_se(&fractions);
    let (mean_cost_per_capita, cost_se) = rng::mean_and_se(&costs);
    let (mean_benefit_per_capita, benefit_se) = rng::mean_and_se(&benefits);
    let mut wins = vec![0u64; spec.n as usize];
    for o in &outcomes {
        wins[o.winner] += 1;
    }
    let realized = spec.prize * wins.iter().sum::<u64>() as f64 / (n * trials as f64);
    Ok(MonteCarloReport {
        trials,
        seed,
        ratio,
        ratio_se,
        mean_cost_per_capita,
        cost_se,
        mean_benefit_per_capita,
        benefit_se,
        realized_benefit_per_capita: realized,
        win_frequency: wins.iter().map(|w| *w as f64 / trials as f64).collect(),
        expected_ratio: tournament_waste(spec.n, spec.k, spec.sigma)?,
    })
}

/// Tullock contest: win probability `x_i^r / Σ x_j^r`, effort cost `x^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContestSpec {
    pub prize: f64,
    pub n: u32,
    pub r: f64,
    pub gamma: f64,
}

impl ContestSpec {
    pub fn new(prize: f64, n: u32, r: f64, gamma: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("a contest needs at least 2 players, got {n}"));
        }
        if !(prize > 0.0) {
            return domain(format!("prize must be positive, got {prize}"));
        }
        if !(r > 0.0 && r <= 1.0) {
            return domain(format!("r must lie in (0, 1], got {r}"));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return domain(format!("gamma must be at least 1, got {gamma}"));
        }
        Ok(Self { prize, n, r, gamma })
    }

    /// Expected payoff of a player exerting `x` against `N - 1` rivals at `others`.
    pub fn payoff(&self, x: f64, others: f64) -> f64 {
        let mine = x.powf(self.r);
        let total = mine + (self.n as f64 - 1.0) * others.powf(self.r);
        let win = if total > 0.0 { mine / total } else { 1.0 / self.n as f64 };
        self.prize * win - x.powf(self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TullockEquilibrium {
    pub effort: f64,
    /// Total effort cost over the prize.
    pub dissipation: f64,
}

/// Symmetric equilibrium: `x^γ = s r (N-1) / (γ N²)`, dissipation `(r/γ)(N-1)/N`.
pub fn tullock_equilibrium(spec: &ContestSpec) -> TullockEquilibrium {
    let n = spec.n as f64;
    let cost = spec.prize * spec.r * (n - 1.0) / (spec.gamma * n * n);
    TullockEquilibrium {
        effort: cost.powf(1.0 / spec.gamma),
        dissipation: n * cost / spec.prize,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub n: u32,
    pub signaling: f64,
    pub contest: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub k: f64,
    pub sigma: f64,
    pub r: f64,
    pub gamma: f64,
    pub rows: Vec<ComparisonRow>,
}

/// Signaling waste next to contest dissipation for each `N`.
pub fn compare_limits(k: f64, sigma: f64, r: f64, gamma: f64, ns: &[u32]) -> Result<ComparisonTable> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return domain("contestant counts must be strictly increasing");
    }
    let rows = ns
        .iter()
        .map(|&n| {
            let contest = tullock_equilibrium(&ContestSpec::new(1.0, n, r, gamma)?).dissipation;
            Ok(ComparisonRow {
                n,
                signaling: tournament_waste(n, k, sigma)?,
                contest,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTable { k, sigma, r, gamma, rows })
}
