use serde::Serialize;

use crate::price::PricePmf;
use crate::{Error, Result};

/// Knobs for [`relative_value_iteration_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RviOptions {
    /// Stop once the span of `T h − h` falls below this. `None` picks
    /// `1e-9 · λ_max · v̄`.
    pub tol: Option<f64>,
    pub max_iters: usize,
    /// Relaxation factor in (0, 1]. Values below one mix in a self-loop,
    /// which guarantees convergence on periodic chains at some cost in speed.
    pub damping: f64,
}

impl Default for RviOptions {
    fn default() -> Self {
        RviOptions { tol: None, max_iters: 1_000_000, damping: 1.0 }
    }
}

/// Converged average-cost solution on the grid `{0, v̄, ..., n v̄}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarySolution {
    pub pmf: PricePmf,
    pub n: usize,
    pub vbar: f64,
    /// Average cost per stage; the long-run value of storage is `−gamma`.
    pub gamma: f64,
    /// Differential cost at each grid state, zero at the empty state.
    pub h: Vec<f64>,
    /// `policy[i][j]` is the action, in multiples of `v̄`, at state `i` and
    /// support price `j`.
    pub policy: Vec<Vec<i8>>,
    pub iterations: usize,
    /// Span of `T h − h` at the returned `h`.
    pub residual: f64,
}

fn backup(h: &[f64], i: usize, price: f64, vbar: f64) -> [f64; 3] {
    // hold, sell, buy
    let hold = h[i];
    let sell = if i > 0 { h[i - 1] - price * vbar } else { f64::INFINITY };
    let buy = if i + 1 < h.len() { h[i + 1] + price * vbar } else { f64::INFINITY };
    [hold, sell, buy]
}

fn bellman(h: &[f64], pmf: &PricePmf, vbar: f64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = pmf
            .support()
            .iter()
            .zip(pmf.probs())
            .map(|(&price, &p)| {
                let [a, b, c] = backup(h, i, price, vbar);
                p * a.min(b).min(c)
            })
            .sum();
    }
}

fn span(xs: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi - lo
}

pub fn relative_value_iteration(
    pmf: &PricePmf,
    n: usize,
    vbar: f64,
    tol: f64,
    max_iters: usize,
) -> Result<StationarySolution> {
    relative_value_iteration_with(pmf, n, vbar, RviOptions { tol: Some(tol), max_iters, damping: 1.0 })
}

/// Solve `H(s) = E[min_v λv + H(s+v)] − γ` on the storage grid with
/// actions in `{−v̄, 0, +v̄}`.
pub fn relative_value_iteration_with(
    pmf: &PricePmf,
    n: usize,
    vbar: f64,
    opts: RviOptions,
) -> Result<StationarySolution> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    if !(vbar > 0.0 && vbar.is_finite()) {
        return Err(Error::InvalidConfig(format!("vbar must be positive, got {vbar}")));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidConfig(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    let tol = opts.tol.unwrap_or(1e-9 * pmf.max() * vbar);
    if !(tol >= 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be non-negative, got {tol}")));
    }

    let mut h = vec![0.0; n + 1];
    let mut th = vec![0.0; n + 1];
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iters {
        bellman(&h, pmf, vbar, &mut th);
        residual = span(th.iter().zip(&h).map(|(t, x)| t - x));
        if residual <= tol {
            let gamma = th[0] - h[0];
            return Ok(StationarySolution::finish(pmf.clone(), n, vbar, gamma, h, iter, residual));
        }
        let d0 = th[0] - h[0];
        for (x, t) in h.iter_mut().zip(&th) {
            *x += opts.damping * (t - *x - d0);
        }
    }
    Err(Error::NotConverged { iterations: opts.max_iters, residual })
}

impl StationarySolution {
    fn finish(pmf: PricePmf, n: usize, vbar: f64, gamma: f64, h: Vec<f64>, iterations: usize, residual: f64) -> Self {
        let mut sol = StationarySolution { pmf, n, vbar, gamma, h, policy: Vec::new(), iterations, residual };
        sol.policy = (0..=n)
            .map(|i| sol.pmf.support().iter().map(|&price| sol.greedy_grid(i, price)).collect())
            .collect();
        sol
    }

    /// Assemble a solution from an externally computed `h` (for example by
    /// policy iteration); the greedy policy is re-extracted.
    pub(crate) fn from_parts(pmf: PricePmf, n: usize, vbar: f64, gamma: f64, h: Vec<f64>, iterations: usize) -> Self {
        let mut th = vec![0.0; n + 1];
        bellman(&h, &pmf, vbar, &mut th);
        let residual = span(th.iter().zip(&h).map(|(t, x)| t - x));
        Self::finish(pmf, n, vbar, gamma, h, iterations, residual)
    }

    pub fn capacity(&self) -> f64 {
        self.n as f64 * self.vbar
    }

    /// Two costs closer than this count as a tie.
    fn tie_eps(&self) -> f64 {
        let scale = self.pmf.max().max(self.pmf.max() - self.pmf.min()) * self.vbar;
        1e-8 * if scale > 0.0 { scale } else { 1.0 }
    }

    fn greedy_grid(&self, i: usize, price: f64) -> i8 {
        let costs = backup(&self.h, i, price, self.vbar);
        let best = costs[0].min(costs[1]).min(costs[2]);
        let eps = self.tie_eps();
        // preference order: hold, sell, buy
        if costs[0] <= best + eps {
            0
        } else if costs[1] <= best + eps {
            -1
        } else {
            1
        }
    }

    /// Action in MWh at grid state `i` and support index `j`.
    pub fn grid_action(&self, i: usize, j: usize) -> f64 {
        self.policy[i][j] as f64 * self.vbar
    }

    /// Differential cost at any `s` in `[0, n v̄]`, linear between grid states.
    pub fn h_at(&self, s: f64) -> f64 {
        let x = (s / self.vbar).clamp(0.0, self.n as f64);
        let i = (x.floor() as usize).min(self.n - 1);
        let w = x - i as f64;
        self.h[i] * (1.0 - w) + self.h[i + 1] * w
    }

    fn candidates(&self, s: f64) -> Vec<f64> {
        let cap = self.capacity();
        let lo = -self.vbar.min(s);
        let hi = self.vbar.min(cap - s);
        let mut vs = vec![0.0, lo, hi];
        let first = ((s + lo) / self.vbar).ceil() as i64;
        let last = ((s + hi) / self.vbar).floor() as i64;
        for g in first..=last {
            let v = g as f64 * self.vbar - s;
            if v > lo && v < hi {
                vs.push(v);
            }
        }
        vs
    }

    fn scored(&self, s: f64, price: f64) -> (Vec<(f64, f64)>, f64) {
        let scored: Vec<(f64, f64)> =
            self.candidates(s).into_iter().map(|v| (v, price * v + self.h_at(s + v))).collect();
        let best = scored.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        (scored, best)
    }

    /// Optimal action at any state in `[0, n v̄]` and any price, minimizing
    /// `λv + H(s+v)` with `H` interpolated. Ties go to the smaller `|v|`, then
    /// to selling.
    pub fn action_at(&self, s: f64, price: f64) -> f64 {
        let (scored, best) = self.scored(s, price);
        let eps = self.tie_eps();
        scored
            .into_iter()
            .filter(|c| c.1 <= best + eps)
            .map(|c| c.0)
            .min_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)))
            .unwrap_or(0.0)
    }

    /// The full set of optimal actions, an interval `[lo, hi]` by convexity.
    pub fn optimal_range(&self, s: f64, price: f64) -> (f64, f64) {
        let (scored, best) = self.scored(s, price);
        let eps = self.tie_eps();
        scored
            .into_iter()
            .filter(|c| c.1 <= best + eps)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.0), hi.max(c.0)))
    }

    /// Largest violation of the Bellman equation over the grid.
    pub fn bellman_residual(&self) -> f64 {
        let mut th = vec![0.0; self.n + 1];
        bellman(&self.h, &self.pmf, self.vbar, &mut th);
        th.iter().zip(&self.h).map(|(t, x)| (x - (t - self.gamma)).abs()).fold(0.0, f64::max)
    }
}
