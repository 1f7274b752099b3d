//! Strategies for games against opponents whose type is uncertain.
//!
//! The crate computes safe (maximin), exploitative (best-response) and
//! trust-weighted blends of the two, for both normal-form Bayesian games
//! and discounted stochastic Bayesian games. For every strategy it measures
//! the missed opportunity (loss when the type belief is right) and the risk
//! (worst loss when the belief is wrong), and compares those numbers with
//! closed-form envelopes.
//!
//! Module map:
//!
//! * [`nfg`]: payoff matrices, mixed strategies, hypothesis sets, exact gaps.
//! * [`optimizer`]: dense simplex LP solver and maximin strategies.
//! * [`bounds`]: opportunity/risk envelopes and the adversarial matrix.
//! * [`sbg`]: stochastic games, value iteration, value-based policies, gaps.
//! * [`behavior`]: Markovian, trigger and neural opponent types.
//! * [`casestudies`]: ordinal 2x2 topology, matching pennies, security game.
//! * [`harness`]: seeded experiments emitting CSV/JSON.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behavior;
pub mod bounds;
pub mod casestudies;
mod error;
pub mod harness;
pub mod nfg;
pub mod optimizer;
pub mod rng;
pub mod sbg;

pub use error::{Error, LpError, Result};
