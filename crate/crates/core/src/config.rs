//! TOML run configuration.
//!
//! ```toml
//! [benefit]
//! stakes = 1.0
//! shape = "isoelastic"      # or "power_of_cdf" (n, k) or "tabulated" (table)
//! beta = 1.0
//!
//! [cost]
//! variant = "multiplicative" # or "quadcubic", "ratio", "mixed"
//! difficulty = "power"       # or "tabulated" (difficulty_table)
//! gamma = 1.0                # list for "mixed"
//! strain = "power"           # or "exponential", "tabulated" (strain_table)
//! sigma = 1.0                # list for "mixed"
//!
//! [domain]
//! theta_bar = 1.0
//! grid_points = 1024
//!
//! [solver]
//! quad_tol = 1e-12
//! ode_rtol = 1e-9
//!
//! [output]
//! path = "out.csv"
//! precision = 12
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::environment::{BenefitShape, BenefitSpec, CostSpec, DifficultySpec, Environment, MixedTerms, StrainSpec, TypeDomain};
use crate::equilibrium::SolverOptions;
use crate::error::{Error, Result};

pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    #[default]
    Isoelastic,
    PowerOfCdf,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenefitConfig {
    #[serde(default = "one")]
    pub stakes: f64,
    #[serde(default)]
    pub shape: ShapeKind,
    #[serde(default = "one")]
    pub beta: f64,
    pub n: Option<u32>,
    pub k: Option<f64>,
    pub table: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostVariant {
    #[default]
    Multiplicative,
    Quadcubic,
    Ratio,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DifficultyKind {
    #[default]
    Power,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StrainKind {
    #[default]
    Power,
    Exponential,
    Tabulated,
}

/// A number or a list of numbers.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn scalar(&self, name: &str) -> Result<f64> {
        match self {
            OneOrMany::One(v) => Ok(*v),
            OneOrMany::Many(_) => Err(Error::Config(format!("{name} must be a single number for this cost"))),
        }
    }

    fn list(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    #[serde(default)]
    pub variant: CostVariant,
    #[serde(default)]
    pub difficulty: DifficultyKind,
    pub gamma: Option<OneOrMany>,
    pub difficulty_table: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub strain: StrainKind,
    pub sigma: Option<OneOrMany>,
    pub strain_table: Option<Vec<(f64, f64)>>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default = "one")]
    pub theta_bar: f64,
    #[serde(default = "default_points")]
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_quad")]
    pub quad_tol: f64,
    #[serde(default = "default_ode")]
    pub ode_rtol: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default = "default_precision")]
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub benefit: BenefitConfig,
    pub cost: CostConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

fn default_points() -> usize {
    TypeDomain::DEFAULT_POINTS
}

fn default_quad() -> f64 {
    SolverOptions::default().quad_rtol
}

fn default_ode() -> f64 {
    SolverOptions::default().ode_rtol
}

fn default_precision() -> usize {
    crate::csv_out::DEFAULT_PRECISION
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            theta_bar: 1.0,
            grid_points: default_points(),
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            quad_tol: default_quad(),
            ode_rtol: default_ode(),
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            precision: default_precision(),
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain.grid_points < MIN_GRID_POINTS {
            return Err(Error::Config(format!(
                "grid_points must be at least {MIN_GRID_POINTS}, got {}",
                self.domain.grid_points
            )));
        }
        if !(self.solver.quad_tol > 0.0) || !(self.solver.ode_rtol > 0.0) {
            return Err(Error::Config("solver tolerances must be positive".into()));
        }
        if self.output.precision == 0 || self.output.precision > 17 {
            return Err(Error::Config(format!(
                "precision must lie in 1..=17, got {}",
                self.output.precision
            )));
        }
        self.environment().map(|_| ())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            quad_rtol: self.solver.quad_tol,
            ode_rtol: self.solver.ode_rtol,
        }
    }

    pub fn type_domain(&self) -> Result<TypeDomain> {
        TypeDomain::log_spaced(self.domain.theta_bar, self.domain.grid_points).map_err(config_err)
    }

    fn benefit(&self) -> Result<BenefitSpec> {
        let b = &self.benefit;
        let shape = match b.shape {
            ShapeKind::Isoelastic => BenefitShape::Isoelastic { beta: b.beta },
            ShapeKind::PowerOfCdf => BenefitShape::PowerOfCdf {
                n: b.n.ok_or_else(|| Error::Config("power_of_cdf needs n".into()))?,
                k: b.k.ok_or_else(|| Error::Config("power_of_cdf needs k".into()))?,
            },
            ShapeKind::Tabulated => BenefitShape::tabulated(
                b.table
                    .as_deref()
                    .ok_or_else(|| Error::Config("tabulated benefit needs table".into()))?,
            )?,
        };
        BenefitSpec::new(b.stakes, shape)
    }

    fn cost(&self) -> Result<CostSpec> {
        let c = &self.cost;
        let gamma = c.gamma.clone().unwrap_or(OneOrMany::One(1.0));
        let sigma = c.sigma.clone().unwrap_or(OneOrMany::One(1.0));
        Ok(match c.variant {
            CostVariant::Multiplicative => {
                let difficulty = match c.difficulty {
                    DifficultyKind::Power => DifficultySpec::Power {
                        gamma: gamma.scalar("gamma")?,
                    },
                    DifficultyKind::Tabulated => DifficultySpec::tabulated(
                        c.difficulty_table
                            .as_deref()
                            .ok_or_else(|| Error::Config("tabulated difficulty needs difficulty_table".into()))?,
                    )?,
                };
                let strain = match c.strain {
                    StrainKind::Power => StrainSpec::Power {
                        sigma: sigma.scalar("sigma")?,
                    },
                    StrainKind::Exponential => StrainSpec::Exponential,
                    StrainKind::Tabulated => StrainSpec::tabulated(
                        c.strain_table
                            .as_deref()
                            .ok_or_else(|| Error::Config("tabulated strain needs strain_table".into()))?,
                    )?,
                };
                CostSpec::Multiplicative { difficulty, strain }
            }
            CostVariant::Quadcubic => CostSpec::QuadCubic,
            CostVariant::Ratio => CostSpec::RatioCost,
            CostVariant::Mixed => {
                let gammas = gamma.list();
                let weights = c.weights.clone().unwrap_or_else(|| vec![1.0; gammas.len()]);
                CostSpec::MixedIsoelastic(MixedTerms::new(weights, gammas, sigma.list())?)
            }
        })
    }

    pub fn environment(&self) -> Result<Environment> {
        let build = || Environment::new(self.benefit()?, self.cost()?, self.domain.theta_bar);
        build().map_err(config_err)
    }
}
