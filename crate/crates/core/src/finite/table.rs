use serde::{Deserialize, Serialize};

use super::{segment_index, snap_to_grid, ProblemConfig};
use crate::price::{Interval, PricePmf};
use crate::{Error, Result};

/// Thresholds `t^i_k` and value-function intercepts `e^i_k` for stages
/// `k = 0..=N` and segments `i = 0..=n+N+1`.
///
/// `V_k(s) = −t^i_k·s + e^i_k` on `[i·v̄, (i+1)·v̄)`; the thresholds of stage
/// `k+1` define the optimal action at stage `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub n_stages: usize,
    pub n: usize,
    pub vbar: f64,
    pub thresholds: Vec<Vec<f64>>,
    pub intercepts: Vec<Vec<f64>>,
}

/// Backward threshold recursion from the terminal salvage row.
pub fn compute_thresholds(cfg: &ProblemConfig) -> Result<ThresholdTable> {
    cfg.validate()?;
    let big_n = cfg.n_stages;
    let n = cfg.n;
    let vbar = cfg.vbar;
    let i_max = cfg.max_segment();
    let width = i_max + 1;

    let mut t = vec![vec![0.0; width]; big_n + 1];
    let mut e = vec![vec![0.0; width]; big_n + 1];

    for i in 0..width {
        t[big_n][i] = if i < n { cfg.salvage } else { -cfg.penalties.slope(big_n, i) };
    }
    for i in n..width {
        // continuation of −t̂·s past capacity with slope −t^i_N
        let prev = if i == 0 { 0.0 } else { e[big_n][i - 1] };
        let prev_t = if i == 0 { cfg.salvage } else { t[big_n][i - 1] };
        e[big_n][i] = prev + (t[big_n][i] - prev_t) * i as f64 * vbar;
    }

    for k in (0..big_n).rev() {
        let pmf = cfg.pmf(k);
        let (next_t, next_e) = (&t[k + 1], &e[k + 1]);
        let tn = |j: usize| next_t[j.min(i_max)];
        let en = |j: usize| next_e[j.min(i_max)];
        let mut row_t = vec![0.0; width];
        let mut row_e = vec![0.0; width];
        let lmax = pmf.max();
        let mean = pmf.mean();
        for i in 0..width {
            let h = cfg.penalties.slope(k, i);
            let c = cfg.penalties.intercept(k, i);
            if i == 0 {
                row_t[0] = tn(1) + phi(pmf, 1.0, tn(1), lmax) - h;
                row_e[0] = c
                    + en(0)
                    + (en(1) - en(0) - vbar * tn(1)) * pmf.cdf(tn(0))
                    + vbar * pmf.theta(&Interval::at_most(tn(0)));
            } else {
                let (up, mid, down) = (tn(i + 1), tn(i), tn(i - 1));
                row_t[i] = down - h + phi(pmf, 1.0, up, down) + (up - down) * pmf.cdf(down);
                let f = en(i - 1) - vbar * up
                    + (en(i) - en(i - 1)) * pmf.cdf(down)
                    + (en(i + 1) - en(i)) * pmf.cdf(mid);
                let g = (i + 1) as f64 * phi(pmf, vbar, up, mid) + i as f64 * phi(pmf, vbar, mid, down)
                    - phi(pmf, vbar, down, lmax)
                    - phi(pmf, vbar, up, lmax);
                row_e[i] = c + vbar * mean + f + g;
            }
        }
        t[k] = row_t;
        e[k] = row_e;
    }

    Ok(ThresholdTable { n_stages: big_n, n, vbar, thresholds: t, intercepts: e })
}

/// Φ^v̄ over `(lo, hi]`; finite endpoints only.
fn phi(pmf: &PricePmf, vbar: f64, lo: f64, hi: f64) -> f64 {
    let iv = Interval::open_closed(lo, hi);
    if iv.is_empty() {
        return 0.0;
    }
    vbar * (pmf.theta(&iv) - lo * pmf.psi(&iv))
}

/// Value of storage per stage from an empty start: `−V_0(0)/N`.
pub fn storage_value(cfg: &ProblemConfig) -> Result<f64> {
    storage_value_from(cfg, 0.0)
}

/// Value of storage per stage from initial state `s0`: `−V_0(s0)/N`.
pub fn storage_value_from(cfg: &ProblemConfig, s0: f64) -> Result<f64> {
    let tbl = compute_thresholds(cfg)?;
    Ok(-tbl.value_function(0, s0)? / cfg.n_stages as f64)
}

impl ThresholdTable {
    pub fn capacity(&self) -> f64 {
        self.n as f64 * self.vbar
    }

    pub fn threshold(&self, k: usize, i: usize) -> f64 {
        let row = &self.thresholds[k];
        row[i.min(row.len() - 1)]
    }

    pub fn intercept(&self, k: usize, i: usize) -> f64 {
        let row = &self.intercepts[k];
        row[i.min(row.len() - 1)]
    }

    fn check_state(&self, s: f64) -> Result<f64> {
        let cap = self.capacity();
        let tol = super::GRID_SNAP * self.vbar;
        if !(s >= -tol && s <= cap + tol) {
            return Err(Error::StateOutOfRange { state: s, capacity: cap });
        }
        Ok(snap_to_grid(s.clamp(0.0, cap), self.vbar))
    }

    /// Expected cost-to-go `V_k(s)`. At `s = s̄` the segment below capacity is
    /// used (left limit).
    pub fn value_function(&self, k: usize, s: f64) -> Result<f64> {
        if k > self.n_stages {
            return Err(Error::StageOutOfRange { stage: k, horizon: self.n_stages });
        }
        let s = self.check_state(s)?;
        let i = segment_index(s, self.vbar).min(self.n - 1);
        Ok(-self.threshold(k, i) * s + self.intercept(k, i))
    }

    /// Optimal net purchase at stage `k` (positive buys) for state `s` and the
    /// revealed price. When several actions are optimal the smallest trade is
    /// returned.
    pub fn optimal_action(&self, k: usize, s: f64, price: f64) -> Result<f64> {
        if k >= self.n_stages {
            return Err(Error::StageOutOfRange { stage: k, horizon: self.n_stages.saturating_sub(1) });
        }
        let s = self.check_state(s)?;
        let vbar = self.vbar;
        let i = segment_index(s, vbar);
        let t = |j: usize| self.threshold(k + 1, j);
        let v = if price > t(i.saturating_sub(1)) {
            (-s).max(-vbar)
        } else if i >= 1 && t(i) < price {
            i as f64 * vbar - s
        } else if t(i) == price {
            // flat on the current segment: staying put is optimal
            0.0
        } else if t(i + 1) <= price {
            (i + 1) as f64 * vbar - s
        } else {
            vbar
        };
        Ok(v.clamp(-vbar, vbar).clamp(-s, self.capacity() - s))
    }

    /// Structural checks: thresholds non-increasing in the segment, value
    /// function continuous at every boundary up to capacity, terminal row.
    pub fn check_invariants(&self, salvage: f64, tol: f64) -> std::result::Result<(), String> {
        let scale = self
            .thresholds
            .iter()
            .flatten()
            .chain(self.intercepts.iter().flatten())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        let eps = tol * scale;
        for (k, row) in self.thresholds.iter().enumerate() {
            for i in 0..row.len() - 1 {
                if row[i + 1] > row[i] + eps {
                    return Err(format!("stage {k}: t^{} = {} > t^{} = {}", i + 1, row[i + 1], i, row[i]));
                }
            }
            for i in 0..self.n {
                let at = (i + 1) as f64 * self.vbar;
                let left = -row[i] * at + self.intercepts[k][i];
                let right = -row[i + 1] * at + self.intercepts[k][i + 1];
                if (left - right).abs() > eps {
                    return Err(format!("stage {k}: value function jumps at segment {} ({left} vs {right})", i + 1));
                }
            }
        }
        let last = &self.thresholds[self.n_stages];
        if last[..self.n].iter().any(|x| *x != salvage) {
            return Err("terminal thresholds below capacity must equal the salvage value".into());
        }
        Ok(())
    }

    /// Rows `stage,segment,threshold,intercept` for segments `0..=n`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..=self.n_stages).flat_map(move |k| (0..=self.n).map(move |i| (k, i, self.thresholds[k][i], self.intercepts[k][i])))
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["stage", "segment", "threshold", "intercept"])?;
        for (k, i, t, e) in self.rows() {
            wtr.write_record([k.to_string(), i.to_string(), t.to_string(), e.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}
