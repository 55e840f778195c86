//! Weighted thermodynamic formalism on chains of full shifts.
//!
//! Levels are indexed from 0 in this API (level 0 is the base shift). Input
//! files and the command-line tool number them from 1.

pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod logspace;
pub mod multifractal;
pub mod optimize;
pub mod potential;
pub mod pressure;
pub mod projection;
pub mod shift_space;

pub use error::{Error, Result};
pub use exec::Workers;
pub use potential::{FiniteDepth, Potential, PushMode, WeightedPotential};
pub use shift_space::{FactorChain, Symbol, WeightVector, Word};
