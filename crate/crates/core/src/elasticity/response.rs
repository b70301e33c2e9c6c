use serde::Serialize;

use crate::backtest::{run_policy, sample_prices};
use crate::exec::{self, Execution};
use crate::finite::{compute_thresholds, ProblemConfig, StagePrices};
use crate::{rng, Error, Result};

/// Average optimal response per price cluster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResponseCurve {
    /// Mean sampled price in each bin (the bin midpoint when empty), ascending.
    pub price_bins: Vec<f64>,
    /// Average action in MWh; `None` for an empty bin.
    pub avg_response: Vec<Option<f64>>,
    pub sample_counts: Vec<usize>,
    pub vbar: f64,
    /// Starting state of every simulated path.
    pub s0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseOptions {
    pub n_paths: usize,
    pub n_bins: usize,
    pub seed: u64,
    pub s0: f64,
    pub exec: Execution,
}

impl ResponseOptions {
    pub fn new(n_paths: usize, n_bins: usize, seed: u64) -> Self {
        ResponseOptions { n_paths, n_bins, seed, s0: 0.0, exec: Execution::default() }
    }
}

/// Simulate `n_paths` horizons from an empty store and average the action
/// per equal-width price bin, pooling all stages.
pub fn average_response(cfg: &ProblemConfig, n_paths: usize, n_bins: usize, seed: u64) -> Result<ResponseCurve> {
    average_response_with(cfg, ResponseOptions::new(n_paths, n_bins, seed))
}

#[derive(Clone)]
struct Accum {
    count: Vec<usize>,
    price: Vec<f64>,
    action: Vec<f64>,
}

impl Accum {
    fn new(bins: usize) -> Self {
        Accum { count: vec![0; bins], price: vec![0.0; bins], action: vec![0.0; bins] }
    }

    fn merge(mut self, other: &Accum) -> Self {
        for b in 0..self.count.len() {
            self.count[b] += other.count[b];
            self.price[b] += other.price[b];
            self.action[b] += other.action[b];
        }
        self
    }
}

pub fn average_response_with(cfg: &ProblemConfig, opts: ResponseOptions) -> Result<ResponseCurve> {
    let pmf = match &cfg.prices {
        StagePrices::Iid(p) => p,
        StagePrices::PerStage(_) => {
            return Err(Error::InvalidConfig("average response needs one price distribution for all stages".into()))
        }
    };
    if opts.n_paths == 0 || opts.n_bins == 0 {
        return Err(Error::InvalidConfig("need at least one path and one bin".into()));
    }
    if !(0.0..=cfg.capacity()).contains(&opts.s0) {
        return Err(Error::StateOutOfRange { state: opts.s0, capacity: cfg.capacity() });
    }
    let tbl = compute_thresholds(cfg)?;
    let (lo, hi) = (pmf.min(), pmf.max());
    let bins = if hi > lo { opts.n_bins } else { 1 };
    let width = (hi - lo) / bins as f64;
    let bin_of = |price: f64| -> usize {
        if width > 0.0 {
            (((price - lo) / width) as usize).min(bins - 1)
        } else {
            0
        }
    };

    let per_path = exec::map_indexed(opts.n_paths, opts.exec, |p| -> Result<Accum> {
        let mut r = rng::stream(opts.seed, p as u64);
        let prices = sample_prices(cfg, &mut r);
        let traj = run_policy(&tbl, cfg, &prices, opts.s0)?;
        let mut acc = Accum::new(bins);
        for (&price, &v) in traj.prices.iter().zip(&traj.actions) {
            let b = bin_of(price);
            acc.count[b] += 1;
            acc.price[b] += price;
            acc.action[b] += v;
        }
        Ok(acc)
    });
    let mut total = Accum::new(bins);
    for acc in per_path {
        total = total.merge(&acc?);
    }

    let price_bins = (0..bins)
        .map(|b| {
            if total.count[b] > 0 {
                total.price[b] / total.count[b] as f64
            } else {
                lo + (b as f64 + 0.5) * width
            }
        })
        .collect();
    let avg_response =
        (0..bins).map(|b| (total.count[b] > 0).then(|| total.action[b] / total.count[b] as f64)).collect();
    Ok(ResponseCurve { price_bins, avg_response, sample_counts: total.count, vbar: cfg.vbar, s0: opts.s0 })
}

/// Sum of absolute deviations between the non-empty bins of the curve and
/// its best non-increasing least-squares fit (pool adjacent violators).
pub fn isotonic_residual(curve: &ResponseCurve) -> f64 {
    let ys: Vec<f64> = curve.avg_response.iter().flatten().copied().collect();
    // blocks of (mean, weight) for the non-decreasing fit of -y
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &y in &ys {
        blocks.push((-y, 1));
        while blocks.len() > 1 {
            let (m2, w2) = blocks[blocks.len() - 1];
            let (m1, w1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().unwrap() = ((m1 * w1 as f64 + m2 * w2 as f64) / w as f64, w);
        }
    }
    let fit = blocks.iter().flat_map(|&(m, w)| std::iter::repeat_n(-m, w));
    ys.iter().zip(fit).map(|(y, f)| (y - f).abs()).sum()
}
