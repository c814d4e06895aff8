//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::auction;
use crate::config::{RunConfig, MIN_GRID_POINTS};
use crate::counterexamples::{self, Family};
use crate::csv_out::{emit_csv, CsvTable, DEFAULT_PRECISION};
use crate::environment::{BenefitSpec, CostSpec, Environment, TypeDomain};
use crate::equilibrium::{self, SolverOptions, Strategy};
use crate::error::{Error, Result};
use crate::ic_verify;
use crate::reproduce::{self, ReproduceOptions};
use crate::tournament::{self, ContestSpec, TournamentSpec};
use crate::waste;

#[derive(Debug, Parser)]
#[command(name = "sigwaste", version, about = "Separating equilibria and the waste ratio of costly signaling")]
pub struct Cli {
    /// TOML run configuration; replaces the per-command environment flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// CSV destination (standard output when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every Monte Carlo draw.
    #[arg(long, global = true, default_value_t = reproduce::DEFAULT_SEED)]
    pub seed: u64,
    /// Number of points in the type grid.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Relative tolerance of the ODE solver.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

/// Isoelastic environment `V = sθ^β`, `C = a^γ θ^{-σ}` on `[0, θ̄]`.
#[derive(Debug, Clone, Args)]
pub struct EnvArgs {
    #[arg(long = "s", default_value_t = 1.0)]
    pub stakes: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Quadcubic,
    Ratio,
    Mixed,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the separating equilibrium: theta, action, cost, waste.
    Solve(EnvArgs),
    /// Waste ratio along the type grid.
    Waste(EnvArgs),
    /// Re-solve across stakes and difficulty exponents.
    Sweep {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long = "stakes", value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0, 10.0])]
        stakes_list: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0, 4.0])]
        gammas: Vec<f64>,
    },
    /// Brute-force incentive-compatibility check of the solved (optionally rescaled) strategy.
    VerifyIc {
        #[command(flatten)]
        env: EnvArgs,
        /// Multiply the equilibrium actions by this factor before checking.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Monte Carlo winner-take-all tournament.
    Tournament {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long = "s", default_value_t = 1.0)]
        prize: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Symmetric Tullock contest equilibrium.
    Tullock {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "s", default_value_t = 1.0)]
        prize: f64,
    },
    /// Signaling waste against contest dissipation across N.
    Compare {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 10, 100, 1000])]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// All-pay auction bids against the signaling difficulty levels.
    Auction {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Stakes-dependent constant waste: s, c, waste.
    Counterexample {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long = "s", value_delimiter = ',', required = true)]
        stakes: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        gammas: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        sigmas: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Run every acceptance check and print a pass/fail table.
    Reproduce,
}

/// Failure classes mapped to exit codes: 2 for configuration, 1 for numerics.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// Resolved environment, grid, solver settings and output target.
struct Context {
    env: Environment,
    domain: TypeDomain,
    solver: SolverOptions,
    out: Option<PathBuf>,
    precision: usize,
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl Cli {
    fn config(&self) -> Result<Option<RunConfig>> {
        self.config.as_deref().map(RunConfig::load).transpose()
    }

    fn grid_points(&self, fallback: usize) -> Result<usize> {
        let m = self.grid_points.unwrap_or(fallback);
        if m < MIN_GRID_POINTS {
            return Err(Error::Config(format!("--grid-points must be at least {MIN_GRID_POINTS}, got {m}")));
        }
        Ok(m)
    }

    fn solver(&self, base: SolverOptions) -> Result<SolverOptions> {
        match self.tol {
            Some(t) if !(t > 0.0) => Err(Error::Config(format!("--tol must be positive, got {t}"))),
            Some(t) => Ok(SolverOptions { ode_rtol: t, ..base }),
            None => Ok(base),
        }
    }

    fn output(&self, cfg: Option<&RunConfig>) -> (Option<PathBuf>, usize) {
        let out = self
            .out
            .clone()
            .or_else(|| cfg.and_then(|c| c.output.path.clone()));
        (out, cfg.map_or(DEFAULT_PRECISION, |c| c.output.precision))
    }

    fn context(&self, args: &EnvArgs) -> Result<Context> {
        let cfg = self.config()?;
        let (out, precision) = self.output(cfg.as_ref());
        let (env, theta_bar, points, solver) = match &cfg {
            Some(c) => (
                c.environment()?,
                c.domain.theta_bar,
                c.domain.grid_points,
                c.solver_options(),
            ),
            None => (
                Environment::new(
                    BenefitSpec::isoelastic(args.stakes, args.beta)?,
                    CostSpec::isoelastic(args.gamma, args.sigma),
                    args.theta_bar,
                )
                .map_err(config_error)?,
                args.theta_bar,
                TypeDomain::DEFAULT_POINTS,
                SolverOptions::default(),
            ),
        };
        let domain = TypeDomain::log_spaced(theta_bar, self.grid_points(points)?).map_err(config_error)?;
        Ok(Context {
            env,
            domain,
            solver: self.solver(solver)?,
            out,
            precision,
        })
    }

    fn simple_output(&self) -> Result<(Option<PathBuf>, usize)> {
        let cfg = self.config()?;
        Ok(self.output(cfg.as_ref()))
    }
}

fn solve_in(ctx: &Context) -> Result<Strategy> {
    match ctx.env.cost {
        CostSpec::Multiplicative { .. } => {
            equilibrium::solve_multiplicative_with(&ctx.env, &ctx.domain, &ctx.solver)
        }
        _ => {
            let (t0, a0) = equilibrium::default_seed(&ctx.env, &ctx.domain)?;
            equilibrium::solve_ode_with(&ctx.env, &ctx.domain, t0, a0, &ctx.solver)
        }
    }
}

fn write(table: &CsvTable, out: Option<&Path>, precision: usize) -> Result<()> {
    emit_csv(table, out, precision)
}

fn run_solve(ctx: &Context) -> Result<()> {
    let s = solve_in(ctx)?;
    let cost = equilibrium::equilibrium_cost(&ctx.env, &s)?;
    let w = waste::waste_profile(&ctx.env, &s)?;
    let mut t = CsvTable::new(&["theta", "action", "cost", "waste"]);
    for i in 0..s.grid().len() {
        t.push(vec![s.grid()[i], s.actions()[i], cost.cost[i], w.values[i]]);
    }
    write(&t, ctx.out.as_deref(), ctx.precision)
}

fn run_waste(ctx: &Context) -> Result<()> {
    let s = solve_in(ctx)?;
    let w = waste::waste_profile(&ctx.env, &s)?;
    let mut t = CsvTable::new(&["theta", "waste"]);
    for (th, v) in w.theta.iter().zip(&w.values) {
        t.push(vec![*th, *v]);
    }
    eprintln!("mean waste {:.12}, spread {:.3e}", w.mean, w.spread);
    write(&t, ctx.out.as_deref(), ctx.precision)
}

fn run_sweep(ctx: &Context, stakes: &[f64], gammas: &[f64]) -> Result<()> {
    let rep = waste::invariance_sweep(&ctx.env, &ctx.domain, stakes, gammas)?;
    let mut t = CsvTable::new(&["s", "gamma", "theta", "action", "cost", "waste"]);
    for run in &rep.runs {
        for i in 0..run.strategy.grid().len() {
            t.push(vec![
                run.stakes,
                run.gamma,
                run.strategy.grid()[i],
                run.strategy.actions()[i],
                run.cost.cost[i],
                run.waste.values[i],
            ]);
        }
    }
    eprintln!(
        "max waste deviation {:.3e}, max|A| range factor {:.3}",
        rep.max_deviation,
        rep.action_range_factor()
    );
    write(&t, ctx.out.as_deref(), ctx.precision)
}

fn run_verify_ic(ctx: &Context, scale: f64) -> Result<()> {
    let s = solve_in(ctx)?;
    let s = if scale == 1.0 { s } else { s.scaled(scale)? };
    let cands = ic_verify::default_candidates(&s);
    let rows = ic_verify::best_responses(&ctx.env, &s, s.grid(), &cands)?;
    let mut t = CsvTable::new(&["theta", "best_mimic", "gain"]);
    for r in &rows {
        t.push(vec![r.theta, r.mimic, r.gain]);
    }
    write(&t, ctx.out.as_deref(), ctx.precision)?;
    let rep = ic_verify::verify_ic(&ctx.env, &s, s.grid(), &cands)?;
    eprintln!("IC holds: max gain {:.3e} <= {:.3e}", rep.max_gain, rep.epsilon);
    Ok(())
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    match &cli.command {
        Command::Solve(args) => run_solve(&cli.context(args)?)?,
        Command::Waste(args) => run_waste(&cli.context(args)?)?,
        Command::Sweep { env, stakes_list, gammas } => run_sweep(&cli.context(env)?, stakes_list, gammas)?,
        Command::VerifyIc { env, scale } => run_verify_ic(&cli.context(env)?, *scale)?,
        Command::Tournament {
            n,
            k,
            sigma,
            prize,
            trials,
        } => {
            let (out, precision) = cli.simple_output()?;
            let spec = TournamentSpec::linear(*prize, *n, *k, *sigma).map_err(config_error)?;
            let r = tournament::simulate_tournament(&spec, *trials, cli.seed)?;
            let mut t = CsvTable::new(&[
                "n",
                "k",
                "sigma",
                "s",
                "trials",
                "ratio",
                "ratio_se",
                "expected_ratio",
                "mean_cost_per_capita",
                "mean_benefit_per_capita",
            ]);
            t.push(vec![
                *n as f64,
                *k,
                *sigma,
                *prize,
                *trials as f64,
                r.ratio,
                opt(r.ratio_se),
                r.expected_ratio,
                r.mean_cost_per_capita,
                r.mean_benefit_per_capita,
            ]);
            write(&t, out.as_deref(), precision)?;
        }
        Command::Tullock { n, r, gamma, prize } => {
            let (out, precision) = cli.simple_output()?;
            let spec = ContestSpec::new(*prize, *n, *r, *gamma).map_err(config_error)?;
            let e = tournament::tullock_equilibrium(&spec);
            let mut t = CsvTable::new(&["n", "r", "gamma", "s", "effort", "dissipation"]);
            t.push(vec![*n as f64, *r, *gamma, *prize, e.effort, e.dissipation]);
            write(&t, out.as_deref(), precision)?;
        }
        Command::Compare {
            n_list,
            k,
            sigma,
            r,
            gamma,
        } => {
            let (out, precision) = cli.simple_output()?;
            let table = tournament::compare_limits(*k, *sigma, *r, *gamma, n_list).map_err(config_error)?;
            let mut t = CsvTable::new(&["n", "signaling_waste", "contest_dissipation"]);
            for row in &table.rows {
                t.push(vec![row.n as f64, row.signaling, row.contest]);
            }
            write(&t, out.as_deref(), precision)?;
        }
        Command::Auction { beta, sigma, gamma, n } => {
            let (out, precision) = cli.simple_output()?;
            auction::AuctionMap::new(*beta, *sigma, *n).map_err(config_error)?;
            let rep = auction::verify_equivalence(*beta, *sigma, *gamma, *n, &auction::default_value_grid())?;
            let mut t = CsvTable::new(&["v", "bid_closed_form", "bid_from_signaling", "discrepancy"]);
            for r in &rep.rows {
                t.push(vec![r.v, r.bid_closed_form, r.bid_from_signaling, r.discrepancy]);
            }
            eprintln!("max discrepancy {:.3e}", rep.max_discrepancy);
            write(&t, out.as_deref(), precision)?;
        }
        Command::Counterexample {
            family,
            stakes,
            weights,
            gammas,
            sigmas,
            beta,
        } => {
            let (out, precision) = cli.simple_output()?;
            if stakes.iter().any(|s| !(*s > 0.0)) {
                return Err(Failure::Config("stakes must be positive".into()));
            }
            let mut t = CsvTable::new(&["s", "c", "waste"]);
            for &s in stakes {
                let (c, w) = match family {
                    FamilyArg::Quadcubic => (Family::QuadCubic.coefficient(s)?.c, Family::QuadCubic.waste(s)?),
                    FamilyArg::Ratio => (Family::Ratio.coefficient(s)?.c, Family::Ratio.waste(s)?),
                    FamilyArg::Mixed => {
                        let w = if weights.is_empty() { vec![1.0; gammas.len()] } else { weights.clone() };
                        let sol = counterexamples::mixed_isoelastic(&w, gammas, sigmas, *beta, s).map_err(|e| match e {
                            Error::Domain(m) => Failure::Config(m),
                            other => Failure::from(other),
                        })?;
                        (sol.c, sol.waste)
                    }
                };
                t.push(vec![s, c, w]);
            }
            write(&t, out.as_deref(), precision)?;
        }
        Command::Reproduce => {
            let base = ReproduceOptions::default();
            let opts = ReproduceOptions {
                seed: cli.seed,
                grid_points: cli.grid_points(base.grid_points)?,
                solver: cli.solver(base.solver)?,
            };
            let outcomes = reproduce::run_all(&opts);
            print!("{}", reproduce::render_table(&outcomes));
            if outcomes.iter().any(|o| !o.passed) {
                return Err(Failure::Numerical("some criteria failed".into()));
            }
        }
    }
    Ok(())
}
