//! Sequential Benjamini-Hochberg procedures for testing many data streams at once.
//!
//! Each stream carries its own sequential test statistic and critical ladder.
//! Statistics are standardized onto a common scale, ranked, and streams are
//! accepted or rejected in step-down/step-up fashion while the rest keep
//! sampling, so that both the false discovery and false non-discovery rates
//! stay below their nominal levels.
//!
//! - [`statistics`]: log-likelihood ratios, signed-root GLRs, Wald ladders, calibration.
//! - [`procedure`]: ladders, standardizers, the stage rules and the sampling driver.
//! - [`simulation`]: stream generators, the fixed-sample BH baseline, Monte Carlo studies.
//! - [`cli`]: configuration files, table output and the streaming run engine behind `seqbh`.

pub mod cli;
pub mod error;
pub mod procedure;
pub mod simulation;
pub mod statistics;

pub use error::{Error, Result};
