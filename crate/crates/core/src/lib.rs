//! Foata bijection, the watershed permutation statistic, Hikita's transition
//! probabilities with exact rational arithmetic, the weighted sampling
//! process behind them, and the bulldozer problem.
//!
//! Every identity the library relies on has a brute-force counterpart here,
//! and the [`verify`] module runs them all.

pub mod bulldozer;
pub mod cli;
pub mod error;
pub mod hikita;
pub mod perm;
pub mod rational;
pub mod sampler;
pub mod verify;
pub mod watershed;

pub use error::{Error, Result};
pub use hikita::{HikitaParams, WeightVector};
pub use perm::{CyclePermutation, LinearOrdering};
pub use rational::Rational;
