//! Analytical and Monte-Carlo model of a two-party optimization-based proof
//! of useful work: payoffs of honest and selfish strategies, security
//! conditions, reward-curve design rules and long-range attack bounds.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod malice;
pub mod markov;
pub mod params;
pub mod reward;
pub mod sim;

pub use error::{Error, Result};
pub use markov::{Party, SecurityCoefficients, StrategyProfile};
pub use params::{ImprovementPair, NetworkParams, RewardArg};
pub use reward::RewardFunction;
