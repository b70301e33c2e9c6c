use std::path::PathBuf;

use anyhow::Result;
use ramp_storage::market::{run_reserve_sim, storage_policy, MarketConfig, ReserveReport};
use serde::Serialize;

use super::{at_least_one, positive, Seeds};
use crate::args::ReservesArgs;
use crate::error::{self, config};
use crate::report::{num, opt, Report};

#[derive(Serialize)]
struct Reserves {
    market: MarketConfig,
    market_config: Option<PathBuf>,
    vbar: f64,
    n: usize,
    n_periods: usize,
    pilot_periods: usize,
    histograms: Option<PathBuf>,
}

fn load_market(path: &std::path::Path) -> Result<MarketConfig> {
    error::require_file(path)?;
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| config(format!("{}: {}", path.display(), e.message())))
}

pub fn reserves(a: ReservesArgs, seeds: &Seeds) -> Result<Report> {
    let market = match (&a.market_config, a.market) {
        (Some(_), Some(_)) => return Err(config("give either market_config or an inline [reserves.market] table")),
        (Some(path), None) => load_market(path)?,
        (None, Some(m)) => m,
        (None, None) => MarketConfig::default(),
    };
    market.validate().map_err(config)?;
    let resolved = Reserves {
        market,
        market_config: a.market_config,
        vbar: positive("vbar", a.vbar.unwrap_or(1.0))?,
        n: at_least_one("n", a.n.unwrap_or(5))?,
        n_periods: at_least_one("n_periods", a.n_periods.unwrap_or(20_000))?,
        pilot_periods: at_least_one("pilot_periods", a.pilot_periods.unwrap_or(20_000))?,
        histograms: a.histograms,
    };
    let seed = seeds.take();

    let sol = storage_policy(&resolved.market, resolved.vbar, resolved.n, resolved.pilot_periods, seed)?;
    let rep = run_reserve_sim(&resolved.market, &sol, resolved.n_periods, seed)?;
    if let Some(dir) = &resolved.histograms {
        std::fs::create_dir_all(dir)?;
        let gen = std::fs::File::create(dir.join("generation_reserve_histogram.csv"))?;
        ReserveReport::write_histogram_csv(&rep.generation_histogram, gen)?;
        let dem = std::fs::File::create(dir.join("demand_reserve_histogram.csv"))?;
        ReserveReport::write_histogram_csv(&rep.demand_histogram, dem)?;
    }

    let mut r = Report::new(
        "reserves",
        &resolved,
        Some(seed),
        &[
            "reliability",
            "generation_reserve",
            "demand_reserve",
            "baseline_generation_reserve",
            "baseline_demand_reserve",
            "generation_change_pct",
            "demand_change_pct",
        ],
    );
    r.summary("mean_price", num(rep.mean_price));
    r.summary("baseline_mean_price", num(rep.baseline_mean_price));
    r.summary("rationed_periods", rep.rationed_periods);
    r.summary("forecast_clips", rep.forecast_clips);
    r.summary("state_clips", rep.state_clips);
    r.summary("generation_histogram", &rep.generation_histogram);
    r.summary("demand_histogram", &rep.demand_histogram);
    for l in &rep.levels {
        r.row(vec![
            num(l.reliability),
            num(l.generation_reserve),
            num(l.demand_reserve),
            num(l.baseline_generation_reserve),
            num(l.baseline_demand_reserve),
            opt(l.generation_change_pct),
            opt(l.demand_change_pct),
        ]);
    }
    Ok(r)
}
