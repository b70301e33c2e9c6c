use rand::Rng;
use serde::Serialize;

use crate::exec::{self, Execution};
use crate::finite::{compute_thresholds, snap_to_grid, ProblemConfig, ThresholdTable};
use crate::stats::Estimate;
use crate::{rng, Error, Result};

/// One simulated or replayed horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub prices: Vec<f64>,
    /// `N + 1` states, starting with `s_0`.
    pub states: Vec<f64>,
    pub actions: Vec<f64>,
    /// `−Σ (h_k(s_k) + λ_k v_k) + t̂·s_N`
    pub profit: f64,
}

/// Apply the optimal threshold policy to a realized price sequence.
pub fn run_policy(tbl: &ThresholdTable, cfg: &ProblemConfig, prices: &[f64], s0: f64) -> Result<Trajectory> {
    if prices.len() != cfg.n_stages {
        return Err(Error::LengthMismatch { expected: cfg.n_stages, got: prices.len() });
    }
    let mut states = Vec::with_capacity(prices.len() + 1);
    let mut actions = Vec::with_capacity(prices.len());
    let mut s = s0;
    let mut profit = 0.0;
    states.push(s);
    for (k, &price) in prices.iter().enumerate() {
        let v = tbl.optimal_action(k, s, price)?;
        profit -= cfg.penalties.eval(k, s, cfg.vbar) + price * v;
        s = snap_to_grid(s + v, cfg.vbar).clamp(0.0, cfg.capacity());
        actions.push(v);
        states.push(s);
    }
    profit += cfg.salvage * s;
    Ok(Trajectory { prices: prices.to_vec(), states, actions, profit })
}

/// Independent stage prices drawn from the configured distributions.
pub fn sample_prices<R: Rng + ?Sized>(cfg: &ProblemConfig, rng: &mut R) -> Vec<f64> {
    (0..cfg.n_stages).map(|k| cfg.pmf(k).sample(rng)).collect()
}

/// Average realized profit per stage over `n_paths` simulated horizons from
/// an empty start. Path `p` uses random stream `p` of `seed`.
pub fn monte_carlo_value(cfg: &ProblemConfig, n_paths: usize, seed: u64) -> Result<Estimate> {
    monte_carlo_value_with(cfg, n_paths, seed, Execution::default())
}

pub fn monte_carlo_value_with(cfg: &ProblemConfig, n_paths: usize, seed: u64, exec: Execution) -> Result<Estimate> {
    if n_paths == 0 {
        return Err(Error::InvalidConfig("need at least one path".into()));
    }
    let tbl = compute_thresholds(cfg)?;
    let per_stage = exec::map_indexed(n_paths, exec, |p| {
        let mut r = rng::stream(seed, p as u64);
        let prices = sample_prices(cfg, &mut r);
        run_policy(&tbl, cfg, &prices, 0.0).map(|t| t.profit / cfg.n_stages as f64)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&per_stage))
}
