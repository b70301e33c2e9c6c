//! Optimal operation and economic value of ramp-constrained energy storage
//! facing exogenous, stage-wise independent electricity prices.
//!
//! The crate is organised by workflow:
//!
//! - [`price`]: discrete price distributions, the interval maps used by the
//!   threshold recursion, and price-series ingestion.
//! - [`finite`]: the finite-horizon threshold table, optimal actions, value
//!   function and value of storage.
//! - [`backtest`]: policy simulation, the perfect-foresight benchmark and
//!   competitive-ratio reports.
//! - [`infinite`]: long-run closed forms, the two-point storage chain and
//!   relative value iteration with its buy/sell phase map.
//! - [`elasticity`]: average and state-conditional price elasticity of demand.
//! - [`market`]: price clearing with storage in the loop and reserve sizing.
//! - [`sweep`]: value-of-storage sweeps over capacity ratio and volatility.
//!
//! Data-parallel loops go through [`exec`]; with the `parallel` feature
//! disabled everything runs sequentially and produces identical output.

pub mod backtest;
pub mod elasticity;
mod error;
pub mod exec;
pub mod finite;
pub mod infinite;
pub mod market;
pub mod price;
pub mod rng;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
