use serde::{Deserialize, Serialize};

use crate::price::PricePmf;
use crate::{Error, Result};

/// `d(λ) = base + amplitude · e^{−λ/scale} / (e^{−λ/scale} + e^{−ref_price/scale})`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandCurve {
    pub base: f64,
    pub amplitude: f64,
    pub scale: f64,
    pub ref_price: f64,
}

impl Default for DemandCurve {
    fn default() -> Self {
        DemandCurve { base: 5.0, amplitude: 30.0, scale: 30.0, ref_price: 50.0 }
    }
}

impl DemandCurve {
    pub fn at(&self, price: f64) -> f64 {
        // logistic in (price − ref_price), written to stay finite for large |price|
        let x = (price - self.ref_price) / self.scale;
        self.base + self.amplitude / (1.0 + x.exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

/// Renewable output: a weighted mixture of normals restricted to `[lo, hi]`
/// and discretized on `points` evenly spaced values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewableMixture {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub components: Vec<MixtureComponent>,
}

impl Default for RenewableMixture {
    fn default() -> Self {
        RenewableMixture {
            lo: 0.0,
            hi: 20.0,
            points: 201,
            components: vec![
                MixtureComponent { weight: 0.5, mean: 4.0, std: 1.5 },
                MixtureComponent { weight: 0.5, mean: 14.0, std: 1.5 },
            ],
        }
    }
}

impl RenewableMixture {
    pub fn to_pmf(&self) -> Result<PricePmf> {
        if !(self.lo >= 0.0 && self.lo < self.hi) || self.points < 2 {
            return Err(Error::InvalidConfig("renewable support needs 0 <= lo < hi and at least 2 points".into()));
        }
        if self.components.is_empty()
            || self.components.iter().any(|c| !(c.weight >= 0.0 && c.std > 0.0 && c.mean.is_finite()))
        {
            return Err(Error::InvalidConfig("renewable mixture needs components with weight >= 0 and std > 0".into()));
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        let support: Vec<f64> = (0..self.points).map(|k| self.lo + k as f64 * step).collect();
        let weights = support
            .iter()
            .map(|&w| {
                self.components
                    .iter()
                    .map(|c| c.weight * (-0.5 * ((w - c.mean) / c.std).powi(2)).exp() / c.std)
                    .sum()
            })
            .collect();
        PricePmf::new(support, weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorModel {
    /// Standard deviation of the renewable forecast error, MWh. Zero turns
    /// forecast errors off.
    pub forecast_std: f64,
    /// The forecast error is truncated at this many standard deviations.
    pub forecast_truncation: f64,
    /// The ISO's estimate of the storage state is off by one of
    /// `{−v̄, 0, +v̄}` with equal probability.
    pub state_error: bool,
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel { forecast_std: 0.5, forecast_truncation: 3.0, state_error: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketConfig {
    /// Conventional supply is `supply_slope · λ` MWh.
    pub supply_slope: f64,
    pub demand: DemandCurve,
    pub renewable: RenewableMixture,
    pub errors: ErrorModel,
    /// Clearing prices are searched in `[0, price_cap]`.
    pub price_cap: f64,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            supply_slope: 0.22,
            demand: DemandCurve::default(),
            renewable: RenewableMixture::default(),
            errors: ErrorModel::default(),
            price_cap: 1000.0,
        }
    }
}

impl MarketConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.supply_slope > 0.0 && self.supply_slope.is_finite()) {
            return bad("supply_slope must be positive");
        }
        let d = &self.demand;
        if !(d.amplitude > 0.0 && d.scale > 0.0 && d.base.is_finite() && d.ref_price.is_finite()) {
            return bad("demand needs amplitude > 0 and scale > 0");
        }
        if !(self.errors.forecast_std >= 0.0 && self.errors.forecast_truncation > 0.0) {
            return bad("forecast_std must be >= 0 and forecast_truncation > 0");
        }
        if !(self.price_cap > 0.0 && self.price_cap.is_finite()) {
            return bad("price_cap must be positive");
        }
        self.renewable.to_pmf().map(|_| ())
    }
}
