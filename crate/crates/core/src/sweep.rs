//! Value of storage over a grid of capacity ratios and price volatilities.

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::finite::{storage_value, ProblemConfig};
use crate::price::{pmf_lognormal, pmf_two_point, pmf_uniform, PricePmf};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    LogNormal,
    Uniform,
    /// Equal mass at `mean ± σ`.
    TwoPoint,
}

/// Everything about the swept problem except `n` and `σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBase {
    pub family: Family,
    pub mean: f64,
    pub support_points: usize,
    /// Log-normal support is `[0, mean + truncation_sigmas · σ]`.
    pub truncation_sigmas: f64,
    pub n_stages: usize,
    pub vbar: f64,
}

impl Default for SweepBase {
    fn default() -> Self {
        SweepBase { family: Family::LogNormal, mean: 50.0, support_points: 200, truncation_sigmas: 6.0, n_stages: 24, vbar: 10.0 }
    }
}

impl SweepBase {
    pub fn pmf(&self, sigma: f64) -> Result<PricePmf> {
        if sigma == 0.0 {
            return PricePmf::degenerate(self.mean);
        }
        match self.family {
            Family::LogNormal => {
                pmf_lognormal(self.mean, sigma, self.support_points, (0.0, self.mean + self.truncation_sigmas * sigma))
            }
            Family::Uniform => pmf_uniform(self.mean, sigma, self.support_points),
            Family::TwoPoint => pmf_two_point(self.mean - sigma, self.mean + sigma, 0.5),
        }
    }

    /// i.i.d. problem with salvage at the mean of the discretized law.
    pub fn config(&self, n: usize, sigma: f64) -> Result<ProblemConfig> {
        let cfg = ProblemConfig::iid(self.pmf(sigma)?, self.n_stages, self.vbar, n);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub n: usize,
    pub sigma: f64,
    pub value: Option<f64>,
    pub error: Option<String>,
}

/// Storage value for every `(n, σ)` pair, `n`-major. A failing cell records
/// its error and the sweep carries on.
pub fn value_sweep(n_values: &[usize], sigma_values: &[f64], base: &SweepBase) -> Vec<SweepCell> {
    value_sweep_with(n_values, sigma_values, base, Execution::default())
}

pub fn value_sweep_with(n_values: &[usize], sigma_values: &[f64], base: &SweepBase, exec: Execution) -> Vec<SweepCell> {
    let cells: Vec<(usize, f64)> = n_values.iter().flat_map(|&n| sigma_values.iter().map(move |&s| (n, s))).collect();
    exec::map_slice(&cells, exec, |&(n, sigma)| {
        match base.config(n, sigma).and_then(|cfg| storage_value(&cfg)) {
            Ok(v) => SweepCell { n, sigma, value: Some(v), error: None },
            Err(e) => SweepCell { n, sigma, value: None, error: Some(e.to_string()) },
        }
    })
}

/// CSV `n,sigma,value`; failed cells leave `value` blank.
pub fn write_sweep_csv<W: std::io::Write>(cells: &[SweepCell], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["n", "sigma", "value"])?;
    for c in cells {
        wtr.write_record([c.n.to_string(), c.sigma.to_string(), c.value.map(|v| v.to_string()).unwrap_or_default()])?;
    }
    wtr.flush()?;
    Ok(())
}
