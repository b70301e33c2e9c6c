use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{omniscient_value, run_policy};
use crate::exec::{self, Execution};
use crate::finite::{compute_thresholds, ProblemConfig, ThresholdTable};
use crate::price::{pmf_from_samples, Day, PricePmf, PriceSeries};
use crate::stats::mean_std;
use crate::{Error, Result};

/// Which days enter the mean ratio: those whose average price is within
/// `c` standard deviations (of the daily averages) of the overall average.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayFilter {
    WithinSigma(f64),
    All,
}

impl DayFilter {
    fn describe(&self) -> String {
        match self {
            DayFilter::WithinSigma(c) => format!("|day mean - overall mean| <= {c} sigma(day means)"),
            DayFilter::All => "all days".into(),
        }
    }
}

/// Where the policy's price distribution comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistSource {
    /// Empirical distribution of every complete day in the series.
    SameMonth,
    /// Empirical distribution of the preceding `m` complete days.
    PastDays(usize),
    /// A distribution known in advance (for synthetic series).
    Known(PricePmf),
}

/// Shape of the storage being backtested; the price distribution and
/// salvage value are filled in per day.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BacktestStorage {
    /// Prices per day after the hour-window filter.
    pub n_stages: usize,
    pub vbar: f64,
    pub n: usize,
    /// Optional binning for the empirical distribution.
    pub bin_width: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DayResult {
    pub date: NaiveDate,
    pub day_mean: f64,
    pub policy_profit: f64,
    pub omniscient_profit: f64,
    pub ratio: Option<f64>,
    pub included: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompetitiveReport {
    pub days: Vec<DayResult>,
    pub mean_ratio: f64,
    pub day_count: usize,
    pub filter: String,
    pub source: DistSource,
    pub overall_mean: f64,
    pub day_mean_std: f64,
    /// Days skipped because the trailing window was not yet full.
    pub skipped_for_history: usize,
    /// Days with zero omniscient profit and non-zero policy profit.
    pub flagged: usize,
}

impl CompetitiveReport {
    /// Per-day CSV: `date,policy_profit,omniscient_profit,ratio,included`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["date", "policy_profit", "omniscient_profit", "ratio", "included"])?;
        for d in &self.days {
            wtr.write_record([
                d.date.to_string(),
                d.policy_profit.to_string(),
                d.omniscient_profit.to_string(),
                d.ratio.map(|r| r.to_string()).unwrap_or_default(),
                d.included.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

const ZERO_PROFIT: f64 = 1e-9;

/// Backtest the threshold policy day by day against the perfect-foresight
/// benchmark.
pub fn competitive_ratio(
    storage: &BacktestStorage,
    series: &PriceSeries,
    filter: DayFilter,
    source: DistSource,
) -> Result<CompetitiveReport> {
    competitive_ratio_with(storage, series, filter, source, Execution::default())
}

pub fn competitive_ratio_with(
    storage: &BacktestStorage,
    series: &PriceSeries,
    filter: DayFilter,
    source: DistSource,
    exec: Execution,
) -> Result<CompetitiveReport> {
    let days = series.complete_days(storage.n_stages);
    if days.is_empty() {
        return Err(Error::NoData);
    }
    let means: Vec<f64> = days.iter().map(|d| d.prices.iter().sum::<f64>() / d.prices.len() as f64).collect();
    let (overall_mean, day_mean_std) = mean_std(&means);

    let from_pmf = |pmf: PricePmf| -> Result<(ProblemConfig, ThresholdTable)> {
        let cfg = ProblemConfig::iid(pmf, storage.n_stages, storage.vbar, storage.n);
        let tbl = compute_thresholds(&cfg)?;
        Ok((cfg, tbl))
    };
    let build = |window: &[Day]| -> Result<(ProblemConfig, ThresholdTable)> {
        let pooled: Vec<f64> = window.iter().flat_map(|d| d.prices.iter().copied()).collect();
        from_pmf(pmf_from_samples(&pooled, storage.bin_width)?)
    };
    let shared = match &source {
        DistSource::SameMonth => Some(build(&days)?),
        DistSource::Known(pmf) => Some(from_pmf(pmf.clone())?),
        DistSource::PastDays(0) => return Err(Error::InvalidConfig("trailing window must be at least one day".into())),
        DistSource::PastDays(_) => None,
    };

    let results = exec::map_indexed(days.len(), exec, |d| -> Result<Option<DayResult>> {
        let local;
        let (cfg, tbl) = match (&shared, &source) {
            (Some(pair), _) => (&pair.0, &pair.1),
            (None, &DistSource::PastDays(m)) => {
                if d < m {
                    return Ok(None);
                }
                local = build(&days[d - m..d])?;
                (&local.0, &local.1)
            }
            (None, _) => unreachable!(),
        };
        let prices = &days[d].prices;
        let policy = run_policy(tbl, cfg, prices, 0.0)?.profit;
        let omni = omniscient_value(cfg, prices, 0.0)?;
        debug_assert!(omni >= policy - 1e-9 * (1.0 + omni.abs()), "omniscient {omni} < policy {policy}");
        let passes = match filter {
            DayFilter::All => true,
            DayFilter::WithinSigma(c) => (means[d] - overall_mean).abs() <= c * day_mean_std,
        };
        let (ratio, note) = if omni.abs() <= ZERO_PROFIT {
            if policy.abs() <= ZERO_PROFIT {
                (Some(1.0), None)
            } else {
                (None, Some("zero omniscient profit with non-zero policy profit".to_string()))
            }
        } else {
            (Some(policy / omni), None)
        };
        Ok(Some(DayResult {
            date: days[d].date,
            day_mean: means[d],
            policy_profit: policy,
            omniscient_profit: omni,
            included: passes && ratio.is_some(),
            ratio,
            note,
        }))
    });

    let mut out = Vec::with_capacity(days.len());
    let mut skipped = 0;
    for r in results {
        match r? {
            Some(day) => out.push(day),
            None => skipped += 1,
        }
    }
    let flagged = out.iter().filter(|d| d.note.is_some()).count();
    let included: Vec<f64> = out.iter().filter(|d| d.included).filter_map(|d| d.ratio).collect();
    let mean_ratio = if included.is_empty() {
        f64::NAN
    } else {
        included.iter().sum::<f64>() / included.len() as f64
    };
    Ok(CompetitiveReport {
        day_count: included.len(),
        days: out,
        mean_ratio,
        filter: filter.describe(),
        source,
        overall_mean,
        day_mean_std,
        skipped_for_history: skipped,
        flagged,
    })
}
