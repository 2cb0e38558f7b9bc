//! Deterministic simulation of representative generation games.
//!
//! Hypotheses and groups are ultimately periodic subsets of ℕ, all
//! probabilities are exact rationals, and every generator construction comes
//! with an independent checker and an adversary that tries to break it.

pub mod adversaries;
pub mod dimension;
pub mod error;
pub mod generators;
pub mod groups;
pub mod harness;
pub mod hypothesis;
pub mod lp;
pub mod measures;
pub mod periodic;
pub mod scalar;

pub use error::{Error, Result};
pub use periodic::PeriodicSet;

/// Exact rational scalar used throughout the engine.
pub type Rational = num_rational::BigRational;
/// Distribution over ℕ with exact rational masses.
pub type Dist = measures::RationalDist<Rational>;
