//! End-to-end checks of every headline result, rendered as a pass/fail table.

use std::fmt::Write as _;

use crate::auction;
use crate::counterexamples::{self, Family};
use crate::environment::{BenefitSpec, CostSpec, DifficultySpec, Environment, MixedTerms, StrainSpec, TypeDomain};
use crate::equilibrium::{self, SolverOptions, Strategy};
use crate::error::Result;
use crate::ic_verify;
use crate::numeric::log_space;
use crate::tournament::{self, ContestSpec, TournamentSpec};
use crate::waste;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: usize,
    pub key: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceOptions {
    pub seed: u64,
    pub grid_points: usize,
    pub solver: SolverOptions,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            grid_points: TypeDomain::DEFAULT_POINTS,
            solver: SolverOptions::default(),
        }
    }
}

pub const KEYS: [&str; 10] = [
    "constant-waste-formula",
    "stakes-difficulty-invariance",
    "equilibrium-cost-invariance",
    "relative-elasticity-characterization",
    "incentive-compatibility",
    "tournament-waste",
    "tullock-comparison",
    "allpay-equivalence",
    "stakes-dependent-waste",
    "envelope-property",
];

const BETA_SIGMA: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

fn unit_domain(opts: &ReproduceOptions) -> Result<TypeDomain> {
    TypeDomain::log_spaced(1.0, opts.grid_points)
}

fn exponential_env(theta_bar: f64) -> Result<Environment> {
    Environment::new(
        BenefitSpec::isoelastic(1.0, 1.0)?,
        CostSpec::Multiplicative {
            difficulty: DifficultySpec::Power { gamma: 1.0 },
            strain: StrainSpec::Exponential,
        },
        theta_bar,
    )
}

fn solve_with(env: &Environment, dom: &TypeDomain, opts: &ReproduceOptions) -> Result<Strategy> {
    match env.cost {
        CostSpec::Multiplicative { .. } => equilibrium::solve_multiplicative_with(env, dom, &opts.solver),
        _ => {
            let (t0, a0) = equilibrium::default_seed(env, dom)?;
            equilibrium::solve_ode_with(env, dom, t0, a0, &opts.solver)
        }
    }
}

/// Every equilibrium the IC and envelope checks run on.
fn catalog(opts: &ReproduceOptions) -> Result<Vec<(String, Environment, Strategy)>> {
    let dom = unit_domain(opts)?;
    let mut envs = Vec::new();
    for &b in &BETA_SIGMA {
        for &s in &BETA_SIGMA {
            envs.push((format!("iso(beta={b},sigma={s})"), Environment::isoelastic(1.0, b, s, 1.0)?));
        }
    }
    envs.push(("iso(s=3,beta=2,sigma=0.5,gamma=3)".into(), Environment::isoelastic(3.0, 2.0, 0.5, 3.0)?));
    envs.push(("exp-strain".into(), exponential_env(1.0)?));
    envs.push(("tournament(N=4,k=2,sigma=1.5)".into(), TournamentSpec::linear(1.0, 4, 2.0, 1.5)?.environment()?));
    envs.push(("quadcubic(s=5)".into(), Family::QuadCubic.environment(5.0, 1.0)?));
    envs.push(("ratio(s=0.75)".into(), Family::Ratio.environment(0.75, 1.0)?));
    envs.push((
        "mixed(w=1,2;gamma=1,2;sigma=0.5,1.5)".into(),
        Environment::new(
            BenefitSpec::isoelastic(3.0, 0.5)?,
            CostSpec::MixedIsoelastic(MixedTerms::new(vec![1.0, 2.0], vec![1.0, 2.0], vec![0.5, 1.5])?),
            1.0,
        )?,
    ));
    envs.into_iter()
        .map(|(name, env)| {
            let s = solve_with(&env, &dom, opts)?;
            Ok((name, env, s))
        })
        .collect()
}

fn outcome(id: usize, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        key: KEYS[id - 1],
        passed,
        detail,
    }
}

fn constant_waste(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let dom = unit_domain(opts)?;
    let mut worst: f64 = 0.0;
    for &b in &BETA_SIGMA {
        for &s in &BETA_SIGMA {
            let env = Environment::isoelastic(1.0, b, s, 1.0)?;
            let p = waste::waste_profile(&env, &solve_with(&env, &dom, opts)?)?;
            let target = b / (b + s);
            worst = p.values.iter().map(|w| (w - target).abs()).fold(worst, f64::max);
        }
    }
    Ok(outcome(1, worst <= 1e-6, format!("max |W - beta/(beta+sigma)| = {worst:.3e} over 16 pairs")))
}

fn sweep(opts: &ReproduceOptions) -> Result<waste::InvarianceReport> {
    waste::invariance_sweep(
        &Environment::isoelastic(1.0, 1.0, 1.0, 1.0)?,
        &unit_domain(opts)?,
        &[0.5, 1.0, 2.0, 10.0],
        &[0.5, 1.0, 2.0, 4.0],
    )
}

fn invariance(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let rep = sweep(opts)?;
    let factor = rep.action_range_factor();
    Ok(outcome(
        2,
        rep.max_deviation <= 1e-6 && factor > 2.0,
        format!("max waste deviation {:.3e}, max|A| range factor {factor:.3}", rep.max_deviation),
    ))
}

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| ((x - y) / y).abs())
        .fold(0.0, f64::max)
}

fn cost_invariance(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let rep = sweep(opts)?;
    let base = &rep.runs[0];
    let mut across_gamma: f64 = 0.0;
    let mut linear_in_s: f64 = 0.0;
    for run in &rep.runs {
        let same_s = rep
            .runs
            .iter()
            .find(|r| r.stakes == run.stakes)
            .expect("sweep contains its own stakes");
        across_gamma = across_gamma.max(max_rel_diff(&run.cost.cost, &same_s.cost.cost));
        let scaled: Vec<f64> = base.cost.cost.iter().map(|c| c * run.stakes / base.stakes).collect();
        linear_in_s = linear_in_s.max(max_rel_diff(&run.cost.cost, &scaled));
    }
    Ok(outcome(
        3,
        across_gamma <= 1e-6 && linear_in_s <= 1e-6,
        format!("across gamma {across_gamma:.3e}, linearity in s {linear_in_s:.3e}"),
    ))
}

fn characterization(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let dom = unit_domain(opts)?;
    let constant_envs = [
        Environment::isoelastic(1.0, 2.0, 3.0, 1.0)?,
        Environment::isoelastic(1.0, 1.0, 1.5, 2.0)?,
        TournamentSpec::linear(1.0, 3, 1.5, 4.5)?.environment()?,
    ];
    let mut ok = true;
    let mut gap: f64 = 0.0;
    for env in &constant_envs {
        let r = waste::check_constant_waste(env, &dom)?;
        ok &= r.waste_constant && r.elasticity_constant;
        gap = gap.max(r.formula_gap);
    }
    ok &= gap <= 1e-8;

    let env = exponential_env(1.0)?;
    let r = waste::check_constant_waste(&env, &dom)?;
    ok &= !r.waste_constant && !r.elasticity_constant;
    let solved = waste::waste_profile(&env, &solve_with(&env, &dom, opts)?)?;
    let oracle_err = r
        .waste
        .theta
        .iter()
        .zip(r.waste.values.iter().zip(&solved.values))
        .map(|(t, (a, b))| {
            let exact = -f64::exp_m1(-t) / t;
            (a - exact).abs().max((b - exact).abs())
        })
        .fold(0.0, f64::max);
    ok &= oracle_err <= 1e-6;
    Ok(outcome(
        4,
        ok,
        format!("|W - 1/(1+rho)| = {gap:.3e}; exponential strain non-constant, oracle error {oracle_err:.3e}"),
    ))
}

fn incentive_compatibility(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let mut worst = (String::new(), 0.0f64);
    let mut ok = true;
    for (name, env, s) in catalog(opts)? {
        let r = ic_verify::check_ic(&env, &s, s.grid(), &ic_verify::default_candidates(&s))?;
        ok &= r.passed;
        let rel = r.max_gain / (r.epsilon / ic_verify::DEFAULT_REL_EPSILON);
        if rel >= worst.1 {
            worst = (name, rel);
        }
    }
    let env = Environment::isoelastic(1.0, 1.0, 1.0, 1.0)?;
    let bad = solve_with(&env, &unit_domain(opts)?, opts)?.scaled(1.5)?;
    let r = ic_verify::check_ic(&env, &bad, bad.grid(), &ic_verify::default_candidates(&bad))?;
    ok &= !r.passed && r.max_gain >= 1e-3;
    Ok(outcome(
        5,
        ok,
        format!(
            "worst equilibrium gain {:.3e}*maxV ({}); 1.5x strategy gain {:.3e}",
            worst.1, worst.0, r.max_gain
        ),
    ))
}

fn tournament_waste(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let mut ok = true;
    for n in 2..=10u32 {
        let w = tournament::tournament_waste(n, 1.0, 1.0)?;
        ok &= (w - (n as f64 - 1.0) / n as f64).abs() <= 1e-15;
    }
    let mut worst_z: f64 = 0.0;
    for n in [2u32, 3, 5] {
        for k in [1.0, 2.0] {
            for sigma in [1.0, 2.0] {
                let rep = tournament::simulate_tournament(&TournamentSpec::linear(1.0, n, k, sigma)?, 100_000, opts.seed)?;
                worst_z = worst_z.max(rep.z_score().unwrap_or(f64::INFINITY));
            }
        }
    }
    ok &= worst_z <= 4.0;
    let rep = tournament::simulate_tournament(&TournamentSpec::linear(1.0, 2, 1.0, 1.0)?, 100_000, opts.seed)?;
    let z_cost = (rep.mean_cost_per_capita - 0.25).abs() / rep.cost_se.unwrap_or(f64::NAN);
    let z_benefit = (rep.mean_benefit_per_capita - 0.5).abs() / rep.benefit_se.unwrap_or(f64::NAN);
    ok &= z_cost <= 4.0 && z_benefit <= 4.0;
    Ok(outcome(
        6,
        ok,
        format!("worst ratio z {worst_z:.2}; E[cost] z {z_cost:.2}, E[V] z {z_benefit:.2}"),
    ))
}

fn tullock(_: &ReproduceOptions) -> Result<CriterionOutcome> {
    let mut err: f64 = 0.0;
    for n in 2..=10u32 {
        let nf = n as f64;
        for (r, g) in [(1.0, 1.0), (1.0, 2.0), (0.5, 1.0), (0.5, 3.0)] {
            let e = tournament::tullock_equilibrium(&ContestSpec::new(1.0, n, r, g)?);
            err = err.max((e.dissipation - r / g * (nf - 1.0) / nf).abs());
            if r == 1.0 && g == 1.0 {
                err = err.max((e.effort - (nf - 1.0) / (nf * nf)).abs());
            }
        }
    }
    let t = tournament::compare_limits(1.0, 1.0, 0.5, 1.0, &[2, 10, 100, 1000])?;
    let last = t.rows[t.rows.len() - 1];
    let ok = err <= 1e-15 && last.signaling >= 0.999 && (last.contest - 0.5).abs() <= 1e-3;
    Ok(outcome(
        7,
        ok,
        format!(
            "closed-form error {err:.1e}; N=1000 signaling {:.6}, contest {:.6}",
            last.signaling, last.contest
        ),
    ))
}

fn allpay(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let grid = auction::default_value_grid();
    let mut disc: f64 = 0.0;
    let mut identity: f64 = 0.0;
    for (b, s, g, n) in [
        (1.0, 1.0, 1.0, 2u32),
        (2.0, 1.0, 2.0, 3),
        (0.5, 2.0, 1.0, 5),
        (3.0, 0.5, 0.5, 4),
        (1.5, 1.0, 3.0, 10),
    ] {
        disc = disc.max(auction::verify_equivalence(b, s, g, n, &grid)?.max_discrepancy);
        let map = auction::AuctionMap::new(b, s, n)?;
        for &v in &grid {
            let (x, y) = auction::conditional_second_highest(&map, v)?;
            identity = identity.max((x - y).abs() / y);
        }
    }
    let map = auction::AuctionMap::new(1.5, 1.0, 4)?;
    let est = auction::mc_conditional_second_highest(&map, 0.8, 1_000_000, opts.seed)?;
    let z = (est.mean - auction::conditional_second_highest(&map, 0.8)?.0).abs() / est.se.unwrap_or(f64::NAN);
    let ok = disc <= 1e-6 && identity <= 4.0 * f64::EPSILON && z <= 3.0;
    Ok(outcome(
        8,
        ok,
        format!("max bid discrepancy {disc:.3e}; identity rel error {identity:.1e}; MC z {z:.2}"),
    ))
}

fn stakes_dependent(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let mut ok = true;
    let c5 = counterexamples::cubic_coefficient(5.0)?;
    let c75 = counterexamples::ratio_coefficient(0.75)?;
    ok &= (c5.c - 1.0).abs() <= 1e-12 && (counterexamples::waste_decreasing(5.0)? - 0.4).abs() <= 1e-12;
    ok &= (c75.c - 1.0).abs() <= 1e-12 && (counterexamples::waste_increasing(0.75)? - 2.0 / 3.0).abs() <= 1e-12;

    let ss = log_space(1e-3, 1e3, 100);
    let mut prev: Option<(f64, f64)> = None;
    let mut max_residual: f64 = 0.0;
    for &s in &ss {
        let (a, b) = (counterexamples::cubic_coefficient(s)?, counterexamples::ratio_coefficient(s)?);
        max_residual = max_residual.max(a.residual).max(b.residual);
        let (wd, wi) = (counterexamples::waste_decreasing(s)?, counterexamples::waste_increasing(s)?);
        ok &= wd > 1.0 / 3.0 && wd < 0.5 && wi > 0.5 && wi < 1.0;
        if let Some((pd, pi)) = prev {
            ok &= wd < pd && wi > pi;
        }
        prev = Some((wd, wi));
    }
    ok &= max_residual <= 1e-12;

    let dom = unit_domain(opts)?;
    let mut spread: f64 = 0.0;
    for (family, stakes) in [(Family::QuadCubic, [1.0, 5.0, 20.0]), (Family::Ratio, [0.2, 0.75, 5.0])] {
        let rep = counterexamples::crosscheck_nonmultiplicative(family, &stakes, &dom)?;
        ok &= rep.passed(1e-6);
        spread = rep.rows.iter().map(|r| r.waste_spread.max(r.max_error)).fold(spread, f64::max);
    }
    Ok(outcome(
        9,
        ok,
        format!("max residual {max_residual:.1e}; ODE waste spread/error {spread:.3e}"),
    ))
}

fn envelope(opts: &ReproduceOptions) -> Result<CriterionOutcome> {
    let mut worst = (String::new(), 0.0f64);
    for (name, env, s) in catalog(opts)? {
        let r = waste::envelope_check(&env, &s)?;
        if r.max_rel_error >= worst.1 {
            worst = (name, r.max_rel_error);
        }
    }
    Ok(outcome(10, worst.1 <= 1e-4, format!("max relative error {:.3e} ({})", worst.1, worst.0)))
}

/// Runs criterion `id` (1-based); numerical failures become failed outcomes.
pub fn run_criterion(id: usize, opts: &ReproduceOptions) -> CriterionOutcome {
    let result = match id {
        1 => constant_waste(opts),
        2 => invariance(opts),
        3 => cost_invariance(opts),
        4 => characterization(opts),
        5 => incentive_compatibility(opts),
        6 => tournament_waste(opts),
        7 => tullock(opts),
        8 => allpay(opts),
        9 => stakes_dependent(opts),
        10 => envelope(opts),
        _ => panic!("no criterion {id}"),
    };
    result.unwrap_or_else(|e| outcome(id, false, format!("error: {e}")))
}

pub fn run_all(opts: &ReproduceOptions) -> Vec<CriterionOutcome> {
    (1..=KEYS.len()).map(|id| run_criterion(id, opts)).collect()
}

pub fn render_table(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::new();
    let width = KEYS.iter().map(|k| k.len()).max().unwrap_or(0);
    for o in outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:>2}  {:<width$}  {status}  {}", o.id, o.key, o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(out, "{passed}/{} criteria passed", outcomes.len());
    out
}
