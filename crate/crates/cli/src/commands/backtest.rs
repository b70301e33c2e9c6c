use std::path::PathBuf;

use anyhow::Result;
use ramp_storage::backtest::{competitive_ratio, BacktestStorage, DayFilter, DistSource};
use ramp_storage::price::{HourWindow, PriceSeries};
use serde::Serialize;
use serde_json::Value;

use super::{at_least_one, positive};
use crate::args::{CompetitiveArgs, SourceKind};
use crate::error::{self, config, usage};
use crate::law::Law;
use crate::report::{num, opt, Report};

#[derive(Serialize)]
struct Competitive {
    input: PathBuf,
    n_stages: usize,
    vbar: f64,
    n: usize,
    bin_width: Option<f64>,
    start_hour: u32,
    end_hour: u32,
    /// `None` keeps every day.
    filter_sigma: Option<f64>,
    source: SourceKind,
    past_days: Option<usize>,
    known: Option<Law>,
}

pub fn competitive(a: CompetitiveArgs) -> Result<Report> {
    let input = a.input.ok_or_else(|| usage("competitive-ratio needs --input"))?;
    error::require_file(&input)?;
    let source = a.source.unwrap_or(SourceKind::SameMonth);
    if source != SourceKind::PastDays && a.past_days.is_some() {
        return Err(config("past_days only applies to source past-days"));
    }
    let known = match (source, &a.known) {
        (SourceKind::Known, Some(k)) => Some(k.resolve(&Law::TwoPoint { lo: 0.0, hi: 1.0, a: 0.5 })?),
        (SourceKind::Known, None) => return Err(config("source known needs a [competitive-ratio.known] table")),
        (_, Some(_)) => return Err(config("the known table only applies to source known")),
        (_, None) => None,
    };
    let window = HourWindow::default();
    let resolved = Competitive {
        input,
        n_stages: at_least_one("n_stages", a.n_stages.unwrap_or(16))?,
        vbar: positive("vbar", a.vbar.unwrap_or(1.0))?,
        n: at_least_one("n", a.n.unwrap_or(4))?,
        bin_width: a.bin_width.map(|w| positive("bin_width", w)).transpose()?,
        start_hour: a.start_hour.unwrap_or(window.start_hour),
        end_hour: a.end_hour.unwrap_or(window.end_hour),
        filter_sigma: a.filter_sigma.filter(|c| c.is_finite()),
        source,
        past_days: (source == SourceKind::PastDays).then(|| a.past_days.unwrap_or(30)),
        known,
    };
    if let Some(c) = resolved.filter_sigma {
        positive("filter_sigma", c)?;
    }
    if resolved.start_hour >= resolved.end_hour || resolved.end_hour > 24 {
        return Err(config("hour window needs start_hour < end_hour <= 24"));
    }
    let dist = match (&resolved.known, resolved.past_days) {
        (Some(law), _) => DistSource::Known(law.pmf()?),
        (None, Some(m)) => DistSource::PastDays(at_least_one("past_days", m)?),
        (None, None) => DistSource::SameMonth,
    };
    let hours = HourWindow { start_hour: resolved.start_hour, end_hour: resolved.end_hour };
    let series = PriceSeries::from_csv_path(&resolved.input, hours).map_err(config)?;
    let storage =
        BacktestStorage { n_stages: resolved.n_stages, vbar: resolved.vbar, n: resolved.n, bin_width: resolved.bin_width };
    let filter = resolved.filter_sigma.map_or(DayFilter::All, DayFilter::WithinSigma);

    let rep = competitive_ratio(&storage, &series, filter, dist)?;
    let mut r = Report::new(
        "competitive-ratio",
        &resolved,
        None,
        &["date", "policy_profit", "omniscient_profit", "ratio", "included"],
    );
    r.summary("mean_ratio", num(rep.mean_ratio));
    r.summary("day_count", rep.day_count);
    r.summary("filter", &rep.filter);
    r.summary("overall_mean", num(rep.overall_mean));
    r.summary("day_mean_std", num(rep.day_mean_std));
    r.summary("skipped_for_history", rep.skipped_for_history);
    r.summary("flagged", rep.flagged);
    for d in &rep.days {
        if let Some(note) = &d.note {
            eprintln!("{}", serde_json::json!({ "warning": note, "date": d.date.to_string() }));
        }
        r.row(vec![
            Value::String(d.date.to_string()),
            num(d.policy_profit),
            num(d.omniscient_profit),
            opt(d.ratio),
            Value::Bool(d.included),
        ]);
    }
    Ok(r)
}
