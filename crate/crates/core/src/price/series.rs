use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, TimeDelta, Timelike};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hours of the day kept when reading a price series: `start_hour <= hour < end_hour`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HourWindow {
    pub start_hour: u32,
    pub end_hour: u32,
}

impl Default for HourWindow {
    /// 08:00 to midnight, sixteen hourly prices per day.
    fn default() -> Self {
        HourWindow { start_hour: 8, end_hour: 24 }
    }
}

impl HourWindow {
    pub fn all_day() -> HourWindow {
        HourWindow { start_hour: 0, end_hour: 24 }
    }

    pub fn contains(&self, t: &NaiveDateTime) -> bool {
        let h = t.hour();
        h >= self.start_hour && h < self.end_hour
    }
}

/// Time-stamped prices with strictly increasing timestamps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    timestamps: Vec<NaiveDateTime>,
    prices: Vec<f64>,
    #[serde(with = "period_seconds")]
    period_length: TimeDelta,
}

mod period_seconds {
    use chrono::TimeDelta;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &TimeDelta, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(d.num_seconds())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<TimeDelta, D::Error> {
        Ok(TimeDelta::seconds(i64::deserialize(d)?))
    }
}

/// One calendar day of prices.
#[derive(Clone, Debug, PartialEq)]
pub struct Day {
    pub date: NaiveDate,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(timestamps: Vec<NaiveDateTime>, prices: Vec<f64>, period_length: TimeDelta) -> Result<PriceSeries> {
        if timestamps.len() != prices.len() {
            return Err(Error::Parse(format!(
                "{} timestamps but {} prices",
                timestamps.len(),
                prices.len()
            )));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("timestamps must be strictly increasing".into()));
        }
        if let Some(p) = prices.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Parse(format!("price {p} is negative or not finite")));
        }
        Ok(PriceSeries { timestamps, prices, period_length })
    }

    /// Read `timestamp,price` rows (header required), keeping rows whose hour
    /// lies in `window`. The period length is the smallest gap between
    /// consecutive raw timestamps (one hour if there is a single row).
    pub fn from_csv_reader<R: Read>(reader: R, window: HourWindow) -> Result<PriceSeries> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 {
            return Err(Error::Parse("expected header `timestamp,price`".into()));
        }
        let mut raw: Vec<(NaiveDateTime, f64)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let ts = rec.get(0).ok_or_else(|| Error::Parse(format!("row {}: missing timestamp", line + 2)))?;
            let price = rec.get(1).ok_or_else(|| Error::Parse(format!("row {}: missing price", line + 2)))?;
            let t = parse_timestamp(ts).ok_or_else(|| Error::Parse(format!("row {}: bad timestamp {ts:?}", line + 2)))?;
            let p: f64 = price
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad price {price:?}", line + 2)))?;
            raw.push((t, p));
        }
        if raw.is_empty() {
            return Err(Error::NoData);
        }
        let period = raw
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .filter(|d| *d > TimeDelta::zero())
            .min()
            .unwrap_or(TimeDelta::hours(1));
        let (timestamps, prices): (Vec<_>, Vec<_>) = raw.into_iter().filter(|(t, _)| window.contains(t)).unzip();
        PriceSeries::new(timestamps, prices, period)
    }

    pub fn from_csv_path(path: &Path, window: HourWindow) -> Result<PriceSeries> {
        let file = std::fs::File::open(path)?;
        PriceSeries::from_csv_reader(file, window)
    }

    pub fn timestamps(&self) -> &[NaiveDateTime] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn period_length(&self) -> TimeDelta {
        self.period_length
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Calendar days holding exactly `per_day` prices, in date order. Days
    /// with any other count are dropped.
    pub fn complete_days(&self, per_day: usize) -> Vec<Day> {
        let mut by_date: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
        for (t, p) in self.timestamps.iter().zip(&self.prices) {
            by_date.entry(t.date()).or_default().push(*p);
        }
        by_date
            .into_iter()
            .filter(|(_, ps)| ps.len() == per_day)
            .map(|(date, prices)| Day { date, prices })
            .collect()
    }
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    if let Ok(t) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(t.naive_local());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t);
        }
    }
    None
}
