//! Discrete price distributions and price-series input.

mod interval;
mod pmf;
mod series;

pub use interval::Interval;
pub use pmf::{pmf_from_samples, pmf_lognormal, pmf_two_point, pmf_uniform, PricePmf};
pub use series::{Day, HourWindow, PriceSeries};
