use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no data")]
    NoData,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("state {state} outside [0, {capacity}]")]
    StateOutOfRange { state: f64, capacity: f64 },

    #[error("stage {stage} outside [0, {horizon}]")]
    StageOutOfRange { stage: usize, horizon: usize },

    #[error("price sequence has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("interval is unbounded below")]
    UnboundedInterval,

    #[error("price {0} is not a support point")]
    PriceNotInSupport(f64),

    #[error("relative value iteration did not converge after {iterations} iterations (residual span {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("price data: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
