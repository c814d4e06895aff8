//! Numerical toolkit for separating equilibria of costly signaling games and the share of
//! surplus they dissipate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auction;
pub mod cli;
pub mod config;
pub mod counterexamples;
pub mod csv_out;
pub mod environment;
pub mod equilibrium;
pub mod error;
pub mod ic_verify;
pub mod numeric;
pub mod reproduce;
pub mod rng;
pub mod tournament;
pub mod waste;

pub use environment::{BenefitShape, BenefitSpec, CostSpec, DifficultySpec, Environment, StrainSpec, TypeDomain};
pub use equilibrium::{solve, Strategy};
pub use error::{Error, Result};
