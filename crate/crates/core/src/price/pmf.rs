use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Interval;
use crate::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// A discrete price distribution on a finite, strictly ascending,
/// non-negative support.
///
/// Probabilities are renormalized on construction; the cached CDF ends at
/// exactly 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf", into = "RawPmf")]
pub struct PricePmf {
    support: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPmf {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawPmf> for PricePmf {
    type Error = Error;
    fn try_from(raw: RawPmf) -> Result<Self> {
        PricePmf::new(raw.support, raw.probs)
    }
}

impl From<PricePmf> for RawPmf {
    fn from(p: PricePmf) -> Self {
        RawPmf { support: p.support, probs: p.probs }
    }
}

impl PricePmf {
    /// Build from support points and non-negative weights. Weights are
    /// normalized to sum to one.
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<PricePmf> {
        if support.is_empty() {
            return Err(Error::NoData);
        }
        if support.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} support points but {} probabilities",
                support.len(),
                weights.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidDistribution("support values must be finite and >= 0".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution("support must be strictly ascending".into()));
        }
        if weights.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("probabilities sum to zero".into()));
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum} after normalization")));
        }
        let mut cdf: Vec<f64> = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(PricePmf { support, probs, cdf })
    }

    /// Point mass at `price`.
    pub fn degenerate(price: f64) -> Result<PricePmf> {
        PricePmf::new(vec![price], vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        self.support[self.support.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.support.iter().zip(&self.probs).map(|(x, p)| p * (x - m).powi(2)).sum()
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// `P(λ ≤ x)`, i.e. ψ over `(−∞, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.support.partition_point(|&s| s <= x);
        if idx == 0 {
            0.0
        } else {
            self.cdf[idx - 1]
        }
    }

    /// Θ: price-weighted probability mass of the support points in `interval`.
    pub fn theta(&self, interval: &Interval) -> f64 {
        let r = interval.index_range(&self.support);
        self.support[r.clone()].iter().zip(&self.probs[r]).map(|(x, p)| x * p).sum()
    }

    /// ψ: probability mass of the support points in `interval`.
    pub fn psi(&self, interval: &Interval) -> f64 {
        let r = interval.index_range(&self.support);
        self.probs[r].iter().sum()
    }

    /// Φ^v̄: `v̄·(Θ(I) − ρ·ψ(I))` with `ρ = inf I`.
    ///
    /// ρ is the infimum of the interval itself, not of the support points it
    /// contains. An empty interval maps to zero.
    pub fn phi(&self, vbar: f64, interval: &Interval) -> Result<f64> {
        if interval.is_empty() {
            return Ok(0.0);
        }
        let rho = interval.inf();
        if !rho.is_finite() {
            return Err(Error::UnboundedInterval);
        }
        let r = interval.index_range(&self.support);
        let inner: f64 = self.support[r.clone()]
            .iter()
            .zip(&self.probs[r])
            .map(|(x, p)| (x - rho) * p)
            .sum();
        Ok(vbar * inner)
    }

    /// Draw one price by inverting the CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.support[self.sample_index(rng)]
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.support.len() - 1)
    }

    /// Index of `price` in the support, if it is a support point.
    pub fn index_of(&self, price: f64) -> Option<usize> {
        let i = self.support.partition_point(|&x| x < price);
        (i < self.support.len() && self.support[i] == price).then_some(i)
    }
}

/// Empirical distribution of observed prices.
///
/// Without `bin_width` every distinct price becomes an atom weighted by its
/// frequency. With a bin width the range `[min, max]` is cut into equal bins
/// starting at `min`; non-empty bins become atoms at their midpoints.
pub fn pmf_from_samples(prices: &[f64], bin_width: Option<f64>) -> Result<PricePmf> {
    if prices.is_empty() {
        return Err(Error::NoData);
    }
    if prices.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidDistribution("non-finite price sample".into()));
    }
    match bin_width {
        None => {
            let mut sorted = prices.to_vec();
            sorted.sort_by(|a, b| a.total_cmp(b));
            let mut support = Vec::new();
            let mut counts: Vec<f64> = Vec::new();
            for x in sorted {
                if support.last() == Some(&x) {
                    *counts.last_mut().unwrap() += 1.0;
                } else {
                    support.push(x);
                    counts.push(1.0);
                }
            }
            PricePmf::new(support, counts)
        }
        Some(w) => {
            if !(w > 0.0) {
                return Err(Error::InvalidDistribution("bin width must be > 0".into()));
            }
            let lo = prices.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = prices.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let bins = (((hi - lo) / w).ceil() as usize).max(1);
            let mut counts = vec![0.0; bins];
            for &x in prices {
                let j = (((x - lo) / w).floor() as usize).min(bins - 1);
                counts[j] += 1.0;
            }
            let (support, weights): (Vec<f64>, Vec<f64>) = counts
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0.0)
                .map(|(j, c)| (lo + (j as f64 + 0.5) * w, *c))
                .unzip();
            PricePmf::new(support, weights)
        }
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut xs: Vec<f64> = (0..points).map(|j| lo + step * j as f64).collect();
    xs[points - 1] = hi;
    xs
}

/// Discretized truncated log-normal distribution.
///
/// The underlying normal parameters are moment-matched to `mean`/`std`
/// before truncation; the density is evaluated at `support_points` evenly
/// spaced prices in `[lo, hi]` and renormalized. Truncation shifts the
/// realized moments slightly.
pub fn pmf_lognormal(mean: f64, std: f64, support_points: usize, truncation: (f64, f64)) -> Result<PricePmf> {
    let (lo, hi) = truncation;
    if !(mean > 0.0 && std > 0.0) || !mean.is_finite() || !std.is_finite() {
        return Err(Error::InvalidDistribution(format!(
            "log-normal moments infeasible for mean {mean}, std {std}"
        )));
    }
    if !(lo >= 0.0 && lo < hi) || !hi.is_finite() {
        return Err(Error::InvalidDistribution(format!("invalid truncation [{lo}, {hi}]")));
    }
    if support_points < 2 {
        return Err(Error::InvalidDistribution("need at least 2 support points".into()));
    }
    let sigma2 = (1.0 + (std / mean).powi(2)).ln();
    let mu = mean.ln() - sigma2 / 2.0;
    let sigma = sigma2.sqrt();
    let support = linspace(lo, hi, support_points);
    let weights: Vec<f64> = support
        .iter()
        .map(|&x| {
            if x <= 0.0 {
                0.0
            } else {
                let z = (x.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
        })
        .collect();
    if weights.iter().all(|w| *w == 0.0) {
        return Err(Error::InvalidDistribution("log-normal density vanishes on the truncation range".into()));
    }
    PricePmf::new(support, weights)
}

/// Equally weighted prices over `[mean − √3·std, mean + √3·std]`.
pub fn pmf_uniform(mean: f64, std: f64, support_points: usize) -> Result<PricePmf> {
    if !(std >= 0.0) || !mean.is_finite() || !std.is_finite() {
        return Err(Error::InvalidDistribution(format!("invalid uniform parameters mean {mean}, std {std}")));
    }
    let half = 3f64.sqrt() * std;
    if mean - half < 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "uniform lower endpoint {} is negative",
            mean - half
        )));
    }
    if std == 0.0 || support_points <= 1 {
        return PricePmf::degenerate(mean);
    }
    let support = linspace(mean - half, mean + half, support_points);
    PricePmf::new(support, vec![1.0; support_points])
}

/// Two prices: `lo` with probability `1 − a`, `hi` with probability `a`.
pub fn pmf_two_point(lo: f64, hi: f64, a: f64) -> Result<PricePmf> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidDistribution(format!("probability of the high price must be in (0,1), got {a}")));
    }
    if !(lo < hi) {
        return Err(Error::InvalidDistribution(format!("need lo < hi, got {lo} and {hi}")));
    }
    PricePmf::new(vec![lo, hi], vec![1.0 - a, a])
}
