use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::{clear_price, MarketConfig};
use crate::infinite::{relative_value_iteration_with, RviOptions, StationarySolution};
use crate::price::pmf_from_samples;
use crate::stats::upper_quantile;
use crate::{rng, Error, Result};

pub const RELIABILITY_LEVELS: [f64; 3] = [1.0, 0.99, 0.98];

/// Which sources of error and which participants are active in a run. An
/// error source is active only when both the switch and the configuration
/// enable it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimSwitches {
    pub storage: bool,
    pub forecast_error: bool,
    pub state_error: bool,
}

/// Period-by-period record of a market run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarketTrace {
    pub prices: Vec<f64>,
    pub renewable: Vec<f64>,
    pub forecast: Vec<f64>,
    /// Storage purchase scheduled by the ISO.
    pub scheduled: Vec<f64>,
    /// Storage purchase actually made.
    pub delivered: Vec<f64>,
    /// `d(λ) + v − (aλ + w)`: positive is a shortfall.
    pub imbalance: Vec<f64>,
    pub generation_draws: Vec<f64>,
    pub demand_draws: Vec<f64>,
    pub rationed: usize,
    pub forecast_clips: usize,
    pub state_clips: usize,
}

fn truncated_normal<R: Rng + ?Sized>(dist: &Normal<f64>, bound: f64, rng: &mut R) -> f64 {
    loop {
        let x = dist.sample(rng);
        if x.abs() <= bound {
            return x;
        }
    }
}

/// Run the market for `n_periods` periods from an empty store.
///
/// Renewables and forecast errors come from random stream 0 of `seed` and
/// state-estimation errors from stream 1, so runs that differ only in the
/// storage see the same weather.
pub fn simulate_market(
    mcfg: &MarketConfig,
    sol: Option<&StationarySolution>,
    switches: SimSwitches,
    n_periods: usize,
    seed: u64,
) -> Result<MarketTrace> {
    mcfg.validate()?;
    let sol = if switches.storage {
        Some(sol.ok_or_else(|| Error::InvalidConfig("storage enabled without a policy".into()))?)
    } else {
        None
    };
    let renewable = mcfg.renewable.to_pmf()?;
    let (w_lo, w_hi) = (renewable.min(), renewable.max());
    let err = mcfg.errors;
    let forecast_on = switches.forecast_error && err.forecast_std > 0.0;
    let normal = Normal::new(0.0, err.forecast_std.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidConfig(format!("forecast error: {e}")))?;
    let mut weather = rng::stream(seed, 0);
    let mut estimation = rng::stream(seed, 1);
    let a = mcfg.supply_slope;

    let mut t = MarketTrace {
        prices: Vec::with_capacity(n_periods),
        renewable: Vec::with_capacity(n_periods),
        forecast: Vec::with_capacity(n_periods),
        scheduled: Vec::with_capacity(n_periods),
        delivered: Vec::with_capacity(n_periods),
        imbalance: Vec::with_capacity(n_periods),
        generation_draws: Vec::with_capacity(n_periods),
        demand_draws: Vec::with_capacity(n_periods),
        rationed: 0,
        forecast_clips: 0,
        state_clips: 0,
    };
    let mut s = 0.0;
    for _ in 0..n_periods {
        let w = renewable.sample(&mut weather);
        let mut w_hat = w;
        if forecast_on {
            w_hat += truncated_normal(&normal, err.forecast_truncation * err.forecast_std, &mut weather);
            if w_hat < w_lo || w_hat > w_hi {
                t.forecast_clips += 1;
                w_hat = w_hat.clamp(w_lo, w_hi);
            }
        }
        let mut s_est = s;
        if let Some(sol) = sol {
            if switches.state_error && err.state_error {
                let shift = [-sol.vbar, 0.0, sol.vbar][estimation.random_range(0..3)];
                let raw = s + shift;
                s_est = raw.clamp(0.0, sol.capacity());
                if s_est != raw {
                    t.state_clips += 1;
                }
            }
        }
        let c = clear_price(mcfg, w_hat, sol, s_est)?;
        if c.rationed {
            t.rationed += 1;
        }
        let delivered = match sol {
            Some(sol) => {
                let (lo, hi) = sol.optimal_range(s, c.price);
                c.storage.clamp(lo, hi)
            }
            None => 0.0,
        };
        let imbalance = mcfg.demand.at(c.price) + delivered - (a * c.price + w);
        if let Some(sol) = sol {
            s = (s + delivered).clamp(0.0, sol.capacity());
        }
        t.prices.push(c.price);
        t.renewable.push(w);
        t.forecast.push(w_hat);
        t.scheduled.push(c.storage);
        t.delivered.push(delivered);
        t.imbalance.push(imbalance);
        t.generation_draws.push(imbalance.max(0.0));
        t.demand_draws.push((-imbalance).max(0.0));
    }
    Ok(t)
}

/// Stationary storage policy for the market: relative value iteration on
/// the 1 $/MWh-binned distribution of cleared prices from a run without
/// storage.
pub fn storage_policy(
    mcfg: &MarketConfig,
    vbar: f64,
    n: usize,
    pilot_periods: usize,
    seed: u64,
) -> Result<StationarySolution> {
    let switches = SimSwitches { storage: false, forecast_error: true, state_error: false };
    let pilot = simulate_market(mcfg, None, switches, pilot_periods, seed)?;
    let pmf = pmf_from_samples(&pilot.prices, Some(1.0))?;
    relative_value_iteration_with(&pmf, n, vbar, RviOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    /// Lower edge of the bin.
    pub draw_mwh: f64,
    pub count: usize,
}

/// Equal-width histogram of non-negative draws starting at zero.
pub fn histogram(draws: &[f64], bin_width: f64) -> Vec<HistogramBin> {
    let max = draws.iter().copied().fold(0.0, f64::max);
    let bins = (max / bin_width).floor() as usize + 1;
    let mut counts = vec![0; bins];
    for &d in draws {
        counts[((d / bin_width).floor() as usize).min(bins - 1)] += 1;
    }
    counts.into_iter().enumerate().map(|(k, count)| HistogramBin { draw_mwh: k as f64 * bin_width, count }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReserveLevel {
    pub reliability: f64,
    pub generation_reserve: f64,
    pub demand_reserve: f64,
    pub baseline_generation_reserve: f64,
    pub baseline_demand_reserve: f64,
    /// `None` when the baseline reserve is zero.
    pub generation_change_pct: Option<f64>,
    pub demand_change_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReserveReport {
    pub n_periods: usize,
    pub seed: u64,
    pub vbar: f64,
    pub n: usize,
    pub levels: Vec<ReserveLevel>,
    pub mean_price: f64,
    pub baseline_mean_price: f64,
    pub rationed_periods: usize,
    pub forecast_clips: usize,
    pub state_clips: usize,
    pub generation_histogram: Vec<HistogramBin>,
    pub demand_histogram: Vec<HistogramBin>,
}

pub const HISTOGRAM_BIN_MWH: f64 = 0.1;

fn pct_change(with: f64, base: f64) -> Option<f64> {
    (base > 0.0).then(|| 100.0 * (with - base) / base)
}

/// Reserve requirements with the storage policy `sol` against a baseline
/// without storage on the same weather.
pub fn run_reserve_sim(mcfg: &MarketConfig, sol: &StationarySolution, n_periods: usize, seed: u64) -> Result<ReserveReport> {
    if n_periods == 0 {
        return Err(Error::InvalidConfig("need at least one period".into()));
    }
    let on = SimSwitches { storage: true, forecast_error: true, state_error: true };
    let off = SimSwitches { storage: false, forecast_error: true, state_error: false };
    let with = simulate_market(mcfg, Some(sol), on, n_periods, seed)?;
    let base = simulate_market(mcfg, None, off, n_periods, seed)?;
    let levels = RELIABILITY_LEVELS
        .iter()
        .map(|&r| {
            let g = upper_quantile(&with.generation_draws, r);
            let d = upper_quantile(&with.demand_draws, r);
            let bg = upper_quantile(&base.generation_draws, r);
            let bd = upper_quantile(&base.demand_draws, r);
            ReserveLevel {
                reliability: r,
                generation_reserve: g,
                demand_reserve: d,
                baseline_generation_reserve: bg,
                baseline_demand_reserve: bd,
                generation_change_pct: pct_change(g, bg),
                demand_change_pct: pct_change(d, bd),
            }
        })
        .collect();
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(ReserveReport {
        n_periods,
        seed,
        vbar: sol.vbar,
        n: sol.n,
        levels,
        mean_price: mean(&with.prices),
        baseline_mean_price: mean(&base.prices),
        rationed_periods: with.rationed,
        forecast_clips: with.forecast_clips,
        state_clips: with.state_clips,
        generation_histogram: histogram(&with.generation_draws, HISTOGRAM_BIN_MWH),
        demand_histogram: histogram(&with.demand_draws, HISTOGRAM_BIN_MWH),
    })
}

impl ReserveReport {
    /// CSV `draw_mwh,count` for one of the two histograms.
    pub fn write_histogram_csv<W: std::io::Write>(bins: &[HistogramBin], w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["draw_mwh", "count"])?;
        for b in bins {
            wtr.write_record([b.draw_mwh.to_string(), b.count.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
