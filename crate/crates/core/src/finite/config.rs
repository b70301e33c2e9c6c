use serde::{Deserialize, Serialize};

use crate::price::PricePmf;
use crate::{Error, Result};

/// Price distribution per stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StagePrices {
    /// The same distribution at every stage.
    Iid(PricePmf),
    /// One distribution per stage `k = 0..N-1`.
    PerStage(Vec<PricePmf>),
}

impl StagePrices {
    pub fn at(&self, k: usize) -> &PricePmf {
        match self {
            StagePrices::Iid(p) => p,
            StagePrices::PerStage(ps) => &ps[k.min(ps.len() - 1)],
        }
    }
}

/// Piecewise-linear storage penalty `h_k(s) = h^i_k·s + c^i_k` on
/// `[i·v̄, (i+1)·v̄)`, one row per stage `k = 0..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    slopes: Vec<Vec<f64>>,
    intercepts: Vec<Vec<f64>>,
}

impl Penalties {
    /// Explicit slopes and intercepts. Segments past the end of a row reuse
    /// its last slope and intercept.
    pub fn new(slopes: Vec<Vec<f64>>, intercepts: Vec<Vec<f64>>) -> Penalties {
        Penalties { slopes, intercepts }
    }

    /// Continuous penalty with the given slopes and `h_k(0) = 0`.
    pub fn from_slopes(slopes: Vec<Vec<f64>>, vbar: f64) -> Penalties {
        let intercepts = slopes.iter().map(|row| continuous_intercepts(row, 0.0, vbar)).collect();
        Penalties { slopes, intercepts }
    }

    /// No penalty up to capacity; slope `λ^max_k + 1` above it, anchored so the
    /// penalty is zero at `s̄`.
    pub fn capacity_barrier(prices: &StagePrices, n_stages: usize, n: usize, vbar: f64) -> Penalties {
        let slopes = (0..=n_stages)
            .map(|k| {
                let barrier = prices.at(k.min(n_stages - 1)).max() + 1.0;
                (0..=n).map(|i| if i < n { 0.0 } else { barrier }).collect()
            })
            .collect();
        Penalties::from_slopes(slopes, vbar)
    }

    pub fn slopes(&self) -> &[Vec<f64>] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[Vec<f64>] {
        &self.intercepts
    }

    pub fn slope(&self, k: usize, i: usize) -> f64 {
        let row = &self.slopes[k];
        row[i.min(row.len() - 1)]
    }

    pub fn intercept(&self, k: usize, i: usize) -> f64 {
        let row = &self.intercepts[k];
        row[i.min(row.len() - 1)]
    }

    /// Penalty incurred at stage `k` in state `s`.
    pub fn eval(&self, k: usize, s: f64, vbar: f64) -> f64 {
        let i = super::segment_index(s, vbar);
        self.slope(k, i) * s + self.intercept(k, i)
    }
}

fn continuous_intercepts(slopes: &[f64], c0: f64, vbar: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(slopes.len());
    for (i, h) in slopes.iter().enumerate() {
        if i == 0 {
            c.push(c0);
        } else {
            let prev = c[i - 1];
            c.push(prev - (h - slopes[i - 1]) * i as f64 * vbar);
        }
    }
    c
}

/// The finite-horizon storage problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    /// Horizon `N`.
    pub n_stages: usize,
    /// Symmetric ramp limit per stage (MWh).
    pub vbar: f64,
    /// Capacity ratio; capacity is `n·v̄`.
    pub n: usize,
    /// Credit per MWh left in storage after the last stage.
    pub salvage: f64,
    pub penalties: Penalties,
    pub prices: StagePrices,
}

impl ProblemConfig {
    /// i.i.d. prices with the default penalties (none below capacity, a
    /// barrier above it) and salvage equal to the distribution mean.
    pub fn iid(pmf: PricePmf, n_stages: usize, vbar: f64, n: usize) -> ProblemConfig {
        let salvage = pmf.mean();
        let prices = StagePrices::Iid(pmf);
        let penalties = Penalties::capacity_barrier(&prices, n_stages.max(1), n, vbar);
        ProblemConfig { n_stages, vbar, n, salvage, penalties, prices }
    }

    pub fn with_salvage(mut self, salvage: f64) -> ProblemConfig {
        self.salvage = salvage;
        self
    }

    pub fn with_penalties(mut self, penalties: Penalties) -> ProblemConfig {
        self.penalties = penalties;
        self
    }

    pub fn capacity(&self) -> f64 {
        self.n as f64 * self.vbar
    }

    /// Distribution of the stage-`k` price.
    pub fn pmf(&self, k: usize) -> &PricePmf {
        self.prices.at(k)
    }

    /// Highest segment index stored in the threshold table.
    pub fn max_segment(&self) -> usize {
        self.n + self.n_stages + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_stages < 1 {
            return bad("horizon must be at least 1".into());
        }
        if self.n < 1 {
            return bad("capacity ratio n must be at least 1".into());
        }
        if !(self.vbar > 0.0) || !self.vbar.is_finite() {
            return bad(format!("ramp limit must be > 0, got {}", self.vbar));
        }
        if let StagePrices::PerStage(ps) = &self.prices {
            if ps.len() != self.n_stages {
                return bad(format!("{} stage distributions for horizon {}", ps.len(), self.n_stages));
            }
        }
        let last = self.pmf(self.n_stages - 1);
        if !(self.salvage >= last.min() && self.salvage <= last.max()) {
            return bad(format!(
                "salvage {} outside the final price range [{}, {}]",
                self.salvage,
                last.min(),
                last.max()
            ));
        }
        if self.penalties.slopes.len() != self.n_stages + 1 || self.penalties.intercepts.len() != self.n_stages + 1 {
            return bad(format!("penalty schedule must have {} stage rows", self.n_stages + 1));
        }
        for k in 0..=self.n_stages {
            let h = &self.penalties.slopes[k];
            let c = &self.penalties.intercepts[k];
            if h.len() != c.len() || h.len() < self.n + 1 {
                return bad(format!("stage {k}: penalty rows need at least {} matching segments", self.n + 1));
            }
            if h.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad(format!("stage {k}: penalty slopes must be finite and >= 0"));
            }
            if h.windows(2).any(|w| w[1] < w[0]) {
                return bad(format!("stage {k}: penalty slopes must be non-decreasing (convex penalty)"));
            }
            let lmax = self.pmf(k.min(self.n_stages - 1)).max();
            if let Some((i, hi)) = h.iter().enumerate().skip(self.n).find(|(_, hi)| **hi <= lmax) {
                return bad(format!(
                    "stage {k}: penalty slope {hi} at segment {i} must exceed the maximum price {lmax}"
                ));
            }
            for i in 1..h.len() {
                let at = i as f64 * self.vbar;
                let left = h[i - 1] * at + c[i - 1];
                let right = h[i] * at + c[i];
                let scale = 1.0 + left.abs().max(right.abs());
                if (left - right).abs() > 1e-9 * scale {
                    return bad(format!("stage {k}: penalty is discontinuous at segment {i}"));
                }
            }
        }
        Ok(())
    }
}
