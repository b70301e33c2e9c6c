//! Price distributions as they appear in flags and config files.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use ramp_storage::price::{
    pmf_from_samples, pmf_lognormal, pmf_two_point, pmf_uniform, HourWindow, PricePmf, PriceSeries,
};
use serde::{Deserialize, Serialize};

use crate::error::{self, config};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Lognormal,
    Uniform,
    TwoPoint,
    Degenerate,
    /// Empirical law of a price CSV.
    Empirical,
    /// Explicit support and probabilities.
    Explicit,
}

/// Price-law flags. In a config file these live in a `prices` sub-table and
/// the family is given by `kind`.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawArgs {
    /// Price distribution family
    #[arg(long = "law", value_enum)]
    pub kind: Option<LawKind>,
    /// Mean price (lognormal, uniform; the single price of a degenerate law)
    #[arg(long)]
    pub mean: Option<f64>,
    /// Standard deviation (lognormal, uniform)
    #[arg(long)]
    pub std: Option<f64>,
    /// Number of support points (lognormal, uniform)
    #[arg(long)]
    pub points: Option<usize>,
    /// Lower end of the support (lognormal truncation, two-point low price)
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Upper end of the support (lognormal truncation, two-point high price)
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Probability of the high price (two-point)
    #[arg(long)]
    pub a: Option<f64>,
    /// Comma-separated support points (explicit)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub support: Option<Vec<f64>>,
    /// Comma-separated weights, normalized on load (explicit)
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
    /// Price CSV with `timestamp,price` rows (empirical)
    #[arg(long)]
    pub prices_csv: Option<PathBuf>,
    /// Bin width for the empirical law; exact values when absent
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// First hour of the day kept from the CSV (empirical)
    #[arg(long)]
    pub start_hour: Option<u32>,
    /// Hour at which the kept window ends, exclusive (empirical)
    #[arg(long)]
    pub end_hour: Option<u32>,
}

/// A fully specified price law, echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Law {
    Lognormal { mean: f64, std: f64, points: usize, lo: f64, hi: f64 },
    Uniform { mean: f64, std: f64, points: usize },
    TwoPoint { lo: f64, hi: f64, a: f64 },
    Degenerate { price: f64 },
    Empirical { prices_csv: PathBuf, bin_width: Option<f64>, start_hour: u32, end_hour: u32 },
    Explicit { support: Vec<f64>, probs: Vec<f64> },
}

impl Law {
    pub fn lognormal(mean: f64, std: f64, points: usize, lo: f64, hi: f64) -> Law {
        Law::Lognormal { mean, std, points, lo, hi }
    }

    fn kind(&self) -> LawKind {
        match self {
            Law::Lognormal { .. } => LawKind::Lognormal,
            Law::Uniform { .. } => LawKind::Uniform,
            Law::TwoPoint { .. } => LawKind::TwoPoint,
            Law::Degenerate { .. } => LawKind::Degenerate,
            Law::Empirical { .. } => LawKind::Empirical,
            Law::Explicit { .. } => LawKind::Explicit,
        }
    }

    pub fn pmf(&self) -> Result<PricePmf> {
        let pmf = match self {
            Law::Lognormal { mean, std, points, lo, hi } => pmf_lognormal(*mean, *std, *points, (*lo, *hi)),
            Law::Uniform { mean, std, points } => pmf_uniform(*mean, *std, *points),
            Law::TwoPoint { lo, hi, a } => pmf_two_point(*lo, *hi, *a),
            Law::Degenerate { price } => PricePmf::degenerate(*price),
            Law::Explicit { support, probs } => PricePmf::new(support.clone(), probs.clone()),
            Law::Empirical { prices_csv, bin_width, start_hour, end_hour } => {
                error::require_file(prices_csv)?;
                let window = HourWindow { start_hour: *start_hour, end_hour: *end_hour };
                let series = PriceSeries::from_csv_path(prices_csv, window).map_err(config)?;
                pmf_from_samples(series.prices(), *bin_width)
            }
        };
        pmf.map_err(|e| config(format!("price law: {e}")))
    }
}

impl LawArgs {
    /// Fill unset fields from `default` when the family matches, then from
    /// the family's own defaults. Fields that do not belong to the chosen
    /// family are rejected.
    pub fn resolve(&self, default: &Law) -> Result<Law> {
        let kind = self.kind.unwrap_or(default.kind());
        self.reject_foreign(kind)?;
        let d = if kind == default.kind() { LawArgs::from(default) } else { LawArgs::default() };
        let f = |x: Option<f64>, dx: Option<f64>, g: f64| x.or(dx).unwrap_or(g);
        let law = match kind {
            LawKind::Lognormal => {
                let mean = f(self.mean, d.mean, 50.0);
                let std = f(self.std, d.std, 20.0);
                Law::Lognormal {
                    mean,
                    std,
                    points: self.points.or(d.points).unwrap_or(100),
                    lo: f(self.lo, d.lo, 0.0),
                    hi: f(self.hi, d.hi, mean + 6.0 * std),
                }
            }
            LawKind::Uniform => Law::Uniform {
                mean: f(self.mean, d.mean, 50.0),
                std: f(self.std, d.std, 20.0),
                points: self.points.or(d.points).unwrap_or(100),
            },
            LawKind::TwoPoint => {
                Law::TwoPoint { lo: f(self.lo, d.lo, 0.0), hi: f(self.hi, d.hi, 1.0), a: f(self.a, d.a, 0.5) }
            }
            LawKind::Degenerate => Law::Degenerate { price: f(self.mean, d.mean, 50.0) },
            LawKind::Empirical => Law::Empirical {
                prices_csv: self
                    .prices_csv
                    .clone()
                    .or(d.prices_csv)
                    .ok_or_else(|| config("empirical price law needs prices_csv"))?,
                bin_width: self.bin_width.or(d.bin_width),
                start_hour: self.start_hour.or(d.start_hour).unwrap_or(HourWindow::default().start_hour),
                end_hour: self.end_hour.or(d.end_hour).unwrap_or(HourWindow::default().end_hour),
            },
            LawKind::Explicit => Law::Explicit {
                support: self.support.clone().or(d.support).ok_or_else(|| config("explicit price law needs support"))?,
                probs: self.probs.clone().or(d.probs).ok_or_else(|| config("explicit price law needs probs"))?,
            },
        };
        Ok(law)
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut note = |set: bool, name| {
            if set {
                out.push(name);
            }
        };
        note(self.mean.is_some(), "mean");
        note(self.std.is_some(), "std");
        note(self.points.is_some(), "points");
        note(self.lo.is_some(), "lo");
        note(self.hi.is_some(), "hi");
        note(self.a.is_some(), "a");
        note(self.support.is_some(), "support");
        note(self.probs.is_some(), "probs");
        note(self.prices_csv.is_some(), "prices_csv");
        note(self.bin_width.is_some(), "bin_width");
        note(self.start_hour.is_some(), "start_hour");
        note(self.end_hour.is_some(), "end_hour");
        out
    }

    fn reject_foreign(&self, kind: LawKind) -> Result<()> {
        let allowed: &[&str] = match kind {
            LawKind::Lognormal => &["mean", "std", "points", "lo", "hi"],
            LawKind::Uniform => &["mean", "std", "points"],
            LawKind::TwoPoint => &["lo", "hi", "a"],
            LawKind::Degenerate => &["mean"],
            LawKind::Empirical => &["prices_csv", "bin_width", "start_hour", "end_hour"],
            LawKind::Explicit => &["support", "probs"],
        };
        match self.present().into_iter().find(|f| !allowed.contains(f)) {
            Some(field) => Err(config(format!("price law field `{field}` does not apply to {kind:?}"))),
            None => Ok(()),
        }
    }
}

impl From<&Law> for LawArgs {
    fn from(law: &Law) -> LawArgs {
        let mut a = LawArgs { kind: Some(law.kind()), ..LawArgs::default() };
        match law.clone() {
            Law::Lognormal { mean, std, points, lo, hi } => {
                (a.mean, a.std, a.points, a.lo, a.hi) = (Some(mean), Some(std), Some(points), Some(lo), Some(hi))
            }
            Law::Uniform { mean, std, points } => (a.mean, a.std, a.points) = (Some(mean), Some(std), Some(points)),
            Law::TwoPoint { lo, hi, a: p } => (a.lo, a.hi, a.a) = (Some(lo), Some(hi), Some(p)),
            Law::Degenerate { price } => a.mean = Some(price),
            Law::Empirical { prices_csv, bin_width, start_hour, end_hour } => {
                (a.prices_csv, a.bin_width, a.start_hour, a.end_hour) =
                    (Some(prices_csv), bin_width, Some(start_hour), Some(end_hour))
            }
            Law::Explicit { support, probs } => (a.support, a.probs) = (Some(support), Some(probs)),
        }
        a
    }
}
