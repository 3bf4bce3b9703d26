//! Random frequency diverse array (RFDA) toolkit.
//!
//! - [`array_model`]: geometry, random carrier offsets, steering vectors and echo synthesis.
//! - [`statistics`]: beampattern, its analytic moments and Monte Carlo estimates.
//! - [`processing`]: observing matrices, matched filtering and greedy sparse recovery.
//! - [`bounds`]: Fisher information, CRBs, coherence guarantees and ML estimation.
//! - [`experiments`]: configuration, seeded campaigns and table output.

pub mod array_model;
pub mod bounds;
pub mod processing;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod statistics;

pub use error::{Result, RfdaError};
