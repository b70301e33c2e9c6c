//! Policy simulation, the perfect-foresight benchmark and competitive ratios.

mod competitive;
mod omniscient;
mod simulate;

pub use competitive::{
    competitive_ratio, competitive_ratio_with, BacktestStorage, CompetitiveReport, DayFilter, DayResult, DistSource,
};
pub use omniscient::omniscient_value;
pub use simulate::{monte_carlo_value, monte_carlo_value_with, run_policy, sample_prices, Trajectory};
