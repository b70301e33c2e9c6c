use serde::Serialize;

use super::StationarySolution;
use crate::rng;
use crate::stats::Estimate;

/// Long-run statistics of the storage chain under a stationary policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStats {
    pub steps: usize,
    /// Profit per stage, `−λ v`.
    pub avg_profit: Estimate,
    /// Fraction of stages spent at each grid state.
    pub occupation: Vec<Estimate>,
}

const BATCHES: usize = 100;

/// Run the greedy grid policy of `sol` for `steps` stages from grid state
/// `start`. Standard errors use batch means.
pub fn simulate_stationary(sol: &StationarySolution, steps: usize, start: usize, seed: u64) -> ChainStats {
    let mut rng = rng::stream(seed, 0);
    let mut i = start.min(sol.n);
    let mut profit = Vec::with_capacity(steps);
    let mut visits = vec![Vec::with_capacity(steps); sol.n + 1];
    for _ in 0..steps {
        for (k, v) in visits.iter_mut().enumerate() {
            v.push(if k == i { 1.0 } else { 0.0 });
        }
        let j = sol.pmf.sample_index(&mut rng);
        let a = sol.policy[i][j];
        profit.push(-sol.pmf.support()[j] * a as f64 * sol.vbar);
        i = (i as i64 + a as i64) as usize;
    }
    ChainStats {
        steps,
        avg_profit: Estimate::batch_means(&profit, BATCHES),
        occupation: visits.iter().map(|v| Estimate::batch_means(v, BATCHES)).collect(),
    }
}
