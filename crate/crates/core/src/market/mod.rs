//! A single-node market with quadratic-cost supply, forecast renewables,
//! price-responsive firm demand and one aggregate storage device running the
//! stationary policy. The ISO clears on its forecasts and its estimate of the
//! storage state; what it got wrong is drawn from reserves.

mod clear;
mod config;
mod sim;

pub use clear::{clear_price, Clearing};
pub use config::{DemandCurve, ErrorModel, MarketConfig, MixtureComponent, RenewableMixture};
pub use sim::{
    histogram, run_reserve_sim, simulate_market, storage_policy, HistogramBin, MarketTrace, ReserveLevel,
    ReserveReport, SimSwitches, RELIABILITY_LEVELS,
};
